#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hermdens/density.hpp"
#include "hermdens/errors.hpp"
#include "hermdens/naive.hpp"

using namespace hermdens;

namespace {

JordanComponent comp(int scale, int hyp, TailKind tail, int64_t p1 = 0, int64_t p2 = 0) {
    JordanComponent c;
    c.scale = scale;
    c.hyperbolic_count = hyp;
    c.tail = tail;
    switch (tail) {
        case TailKind::unit: c.unit_a = (uint32_t)p1; break;
        case TailKind::A_1_2b_1:
        case TailKind::A_2delta_2b_1: c.b_param = p1; break;
        case TailKind::A_4a_2delta_pi: c.a_param = p1; break;
        case TailKind::none: break;
    }
    (void)p2;
    c.rank = 2 * hyp + c.tail_rank();
    return c;
}

TypeProfile prof(std::vector<JordanComponent> cs, int f = 1) {
    return classify_components(cs, f);
}

// the worked examples that anchor the whole pipeline
const std::vector<JordanComponent> kRankOne = {comp(0, 0, TailKind::unit, 1)};
const std::vector<JordanComponent> kHyperbolic = {comp(0, 1, TailKind::none)};
const std::vector<JordanComponent> kUnimodularPair = {comp(0, 0, TailKind::A_1_2b_1, 1)};
const std::vector<JordanComponent> kUnitPlusH1 = {comp(0, 0, TailKind::unit, 1),
                                                  comp(1, 1, TailKind::none)};

} // namespace

TEST_CASE("classification of the anchor profiles") {
    TypeProfile p = prof(kRankOne);
    REQUIRE(p.scales.size() == 1);
    CHECK(p.scales[0].tag == TypeTag::I_odd_rank);
    CHECK_FALSE(p.scales[0].bound);
    CHECK(p.n == 1);

    p = prof({comp(0, 1, TailKind::none), comp(1, 1, TailKind::none)});
    REQUIRE(p.scales.size() == 2);
    CHECK(p.scales[0].tag == TypeTag::II_even);
    CHECK(p.scales[0].bbar == 0);
    CHECK_FALSE(p.scales[0].bound);
    CHECK(p.scales[1].tag == TypeTag::II_odd_scale);
    CHECK_FALSE(p.scales[1].bound);

    p = prof(kUnitPlusH1);
    REQUIRE(p.scales.size() == 2);
    CHECK(p.scales[0].tag == TypeTag::I_odd_rank);
    CHECK(p.scales[1].tag == TypeTag::I_odd_scale);
    CHECK(p.scales[1].bound);
}

TEST_CASE("zero lattice conventions fill the gaps") {
    TypeProfile p = prof(kRankOne);
    CHECK(p.effective_type_I(0));
    CHECK(p.effective_type_I(1));   // odd neighbour of a type I even scale
    CHECK(p.effective_type_I(-1));
    CHECK_FALSE(p.effective_type_I(2));
    CHECK_FALSE(p.effective_type_I(3));

    // an even type II scale next to an absent-but-type-I odd scale is bound
    p = prof({comp(0, 1, TailKind::none), comp(2, 0, TailKind::unit, 1)});
    CHECK(p.effective_type_I(1));
    REQUIRE(p.find(0) != nullptr);
    CHECK(p.find(0)->bound);
}

TEST_CASE("exponent bookkeeping matches the worked values") {
    long NM = 0, NH = 0;

    CHECK(exponent_N_via_models(prof(kRankOne), &NM, &NH) == 0);
    CHECK(exponent_N_direct(prof(kRankOne)) == 0);

    CHECK(exponent_N_direct(prof(kHyperbolic)) == 2);
    CHECK(exponent_N_direct(prof(kUnimodularPair)) == 0);
    CHECK(exponent_N_direct(prof(kUnitPlusH1)) == 3);

    // both bookkeeping routes agree on a spread of profiles
    std::vector<std::vector<JordanComponent>> profiles = {
        kRankOne,
        kHyperbolic,
        kUnimodularPair,
        kUnitPlusH1,
        {comp(0, 2, TailKind::A_2delta_2b_1, 1)},
        {comp(1, 0, TailKind::A_4a_2delta_pi, 1)},
        {comp(0, 0, TailKind::unit, 3), comp(2, 1, TailKind::none), comp(3, 0, TailKind::A_4a_2delta_pi, 0)},
        {comp(-2, 1, TailKind::none), comp(1, 1, TailKind::none)},
        {comp(-1, 0, TailKind::A_4a_2delta_pi, 1), comp(0, 0, TailKind::A_1_2b_1, 2), comp(4, 0, TailKind::unit, 7)},
    };
    for (const auto& cs : profiles) {
        TypeProfile p = prof(cs);
        CHECK(exponent_N_via_models(p, &NM, &NH) == exponent_N_direct(p));
    }
}

TEST_CASE("component counting exponent") {
    CHECK(beta_count(prof(kRankOne)) == 1);
    CHECK(beta_count(prof(kHyperbolic)) == 0);
    CHECK(beta_count(prof(kUnitPlusH1)) == 1);
    CHECK(beta_count(prof(kUnimodularPair)) == 1);

    // two type I scales too close together: the window fails for the lower one
    CHECK(beta_count(prof({comp(0, 0, TailKind::unit, 1), comp(4, 0, TailKind::unit, 1)})) == 1);
    CHECK(beta_count(prof({comp(0, 0, TailKind::unit, 1), comp(6, 0, TailKind::unit, 1)})) == 2);
}

TEST_CASE("reductive factors of the anchor profiles") {
    auto fs = reductive_factors(prof(kRankOne));
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].kind == GroupKind::odd_orthogonal);
    CHECK(fs[0].dim == 1);

    fs = reductive_factors(prof(kHyperbolic));
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].kind == GroupKind::even_orthogonal);
    CHECK(fs[0].dim == 2);
    CHECK(fs[0].sign == +1);

    fs = reductive_factors(prof(kUnitPlusH1));
    REQUIRE(fs.size() == 2);
    CHECK(fs[0].kind == GroupKind::odd_orthogonal);
    CHECK(fs[0].dim == 1);
    CHECK(fs[1].kind == GroupKind::symplectic);
    CHECK(fs[1].dim == 2);

    // nonsplit residue form
    fs = reductive_factors(prof({comp(0, 1, TailKind::A_2delta_2b_1, 1)}));
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].sign == -1);

    // over F_4 the same residue has trace zero, so the form splits
    fs = reductive_factors(prof({comp(0, 1, TailKind::A_2delta_2b_1, 1)}, 2));
    CHECK(fs[0].sign == +1);
}

TEST_CASE("classical group orders and dimensions") {
    mpz_class f2 = 2, f4 = 4;
    CHECK(classical_group_order({GroupKind::symplectic, 2, 0, 0}, f2) == 6);
    CHECK(classical_group_order({GroupKind::symplectic, 0, 0, 0}, f2) == 1);
    CHECK(classical_group_order({GroupKind::even_orthogonal, 2, +1, 0}, f2) == 2);
    CHECK(classical_group_order({GroupKind::even_orthogonal, 2, -1, 0}, f2) == 6);
    CHECK(classical_group_order({GroupKind::even_orthogonal, 4, -1, 0}, f2) == 120);
    CHECK(classical_group_order({GroupKind::odd_orthogonal, 3, 0, 0}, f4) == 4 * 15);

    CHECK(classical_group_dim({GroupKind::symplectic, 2, 0, 0}) == 3);
    CHECK(classical_group_dim({GroupKind::even_orthogonal, 2, +1, 0}) == 1);
    CHECK(classical_group_dim({GroupKind::odd_orthogonal, 3, 0, 0}) == 3);
}

TEST_CASE("unipotent dimensions of the anchor profiles") {
    TypeProfile p = prof(kRankOne);
    CHECK(unipotent_dimension(p) == 1);
    CHECK(norm_one_dimension(p) == 1);
    CHECK(unipotent_point_exponent(p) == 0);

    p = prof(kHyperbolic);
    CHECK(unipotent_dimension(p) == 3);
    CHECK(norm_one_dimension(p) == 3);
    CHECK(unipotent_point_exponent(p) == 0);

    p = prof(kUnitPlusH1);
    CHECK(unipotent_dimension(p) == 6);
    CHECK(norm_one_dimension(p) == 4);
    CHECK(unipotent_point_exponent(p) == 2);

    p = prof(kUnimodularPair);
    CHECK(unipotent_dimension(p) == 4);
}

TEST_CASE("special fiber counts and densities of the anchor profiles") {
    CHECK(special_fiber_count(prof(kRankOne)) == 4);
    CHECK(special_fiber_count(prof(kHyperbolic)) == 16);
    CHECK(special_fiber_count(prof(kUnitPlusH1)) == 768);
    CHECK(special_fiber_count(prof(kUnimodularPair)) == 32);

    CHECK(local_density(prof(kRankOne)).beta_L == 2);
    CHECK(local_density(prof(kHyperbolic)).beta_L == 4);
    CHECK(local_density(prof(kUnimodularPair)).beta_L == 2);
    CHECK(local_density(prof(kUnitPlusH1)).beta_L == 12);

    DensityReport r = local_density(prof(kUnitPlusH1));
    CHECK(r.N_M == 8);
    CHECK(r.N_H == 11);
    CHECK(r.beta == 1);
    CHECK(r.a_count == 0);
}

TEST_CASE("empty profile has density one") {
    TypeProfile p = prof({});
    CHECK(p.n == 0);
    DensityReport r = local_density(p);
    CHECK(r.beta_L == 1);
    CHECK(r.fiber_count == 1);
}

TEST_CASE("formula against the counting oracle at other scales") {
    // pure odd scale, type II: both roads give 24
    DensityReport r = local_density(prof({comp(1, 1, TailKind::none)}));
    CHECK(r.beta_L == 24);

    // pure odd scale, free type I tail: 16
    r = local_density(prof({comp(1, 0, TailKind::A_4a_2delta_pi, 0)}));
    CHECK(r.beta_L == 16);

    // rank one pushed up a full scale step: 4
    r = local_density(prof({comp(2, 0, TailKind::unit, 7)}));
    CHECK(r.beta_L == 4);

    // and the same three numbers straight from the mod-2^k counts
    int K = 11;
    BMatrix h1 = BMatrix::zeros(2, 2, K, 1);
    h1.set(0, 1, RamifiedElem::pi(K, 1));
    h1.set(1, 0, neg(RamifiedElem::pi(K, 1)));
    CHECK(density_estimate(HermitianGram::from_matrix(h1), 6).density == 24);

    BMatrix t = h1;
    t.set(1, 1, RamifiedElem::from_int(2, K, 1));
    CHECK(density_estimate(HermitianGram::from_matrix(t), 6).density == 16);

    BMatrix u = BMatrix::zeros(1, 1, K, 1);
    u.set(0, 0, RamifiedElem::from_int(-2, K, 1));
    CHECK(density_estimate(HermitianGram::from_matrix(u), 6).density == 4);
}

TEST_CASE("fiber dimension splits into unipotent and reductive parts") {
    std::vector<std::vector<JordanComponent>> profiles = {
        kRankOne,
        kHyperbolic,
        kUnimodularPair,
        kUnitPlusH1,
        {comp(0, 2, TailKind::A_2delta_2b_1, 1)},
        {comp(1, 0, TailKind::A_4a_2delta_pi, 1)},
        {comp(0, 0, TailKind::unit, 3), comp(2, 1, TailKind::none), comp(3, 0, TailKind::A_4a_2delta_pi, 0)},
        {comp(0, 0, TailKind::A_1_2b_1, 2), comp(1, 1, TailKind::none), comp(2, 0, TailKind::unit, 5)},
    };
    for (const auto& cs : profiles) {
        TypeProfile p = prof(cs);
        long s = unipotent_dimension(p);
        for (const auto& g : reductive_factors(p)) s += classical_group_dim(g);
        CHECK(s == (long)p.n * p.n);
        CHECK(norm_one_dimension(p) + unipotent_point_exponent(p) == unipotent_dimension(p));
    }
}

TEST_CASE("residue degree scales the density") {
    // hyperbolic plane over F_4: N - n^2 = -2, fiber = 4^3 * |O+(2, F_4)|
    TypeProfile p = prof(kHyperbolic, 2);
    DensityReport r = local_density(p);
    CHECK(r.fiber_count == 64 * 2 * 3);  // 4^3 * 2*(4-1)
    CHECK(r.beta_L == 24);  // 384 / 4^2
}
