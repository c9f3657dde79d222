#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hermdens/classify.hpp"
#include "hermdens/density.hpp"
#include "hermdens/errors.hpp"
#include "hermdens/fiber.hpp"
#include "hermdens/gram.hpp"

using namespace hermdens;

namespace {

JordanComponent comp(int scale, int rank, int hyp, TailKind tail,
                     uint32_t ua = 1, int64_t bp = 0, int64_t ap = 0) {
    JordanComponent c;
    c.scale = scale;
    c.rank = rank;
    c.hyperbolic_count = hyp;
    c.tail = tail;
    c.unit_a = ua;
    c.b_param = bp;
    c.a_param = ap;
    return c;
}

JordanDecomposition dec_of(std::vector<JordanComponent> comps, uint32_t delta) {
    JordanDecomposition d;
    d.comps = std::move(comps);
    d.K = kDefaultPrecision;
    d.delta = delta;
    d.U = BMatrix::identity(0, d.K, delta);
    d.normal_form = assemble_normal_form(d.comps, d.K, delta);
    return d;
}

mpz_class fiber(const JordanDecomposition& d, FiberLimits lim = {}) {
    FiberResult r = enumerate_fiber_points(d, lim);
    REQUIRE_FALSE(r.partial);
    return r.count;
}

} // namespace

TEST_CASE("rank one lattices have four fiber points") {
    for (uint32_t dl : {1u, 3u})
        for (uint32_t ua : {1u, 3u, 5u, 7u})
            CHECK(fiber(dec_of({comp(0, 1, 0, TailKind::unit, ua)}, dl)) == 4);
    // pushing the scale up does not change the count
    CHECK(fiber(dec_of({comp(2, 1, 0, TailKind::unit, 1)}, 1)) == 4);
    CHECK(fiber(dec_of({comp(2, 1, 0, TailKind::unit, 5)}, 3)) == 4);
}

TEST_CASE("rank two lattices at a single scale") {
    // hyperbolic plane at an even scale
    CHECK(fiber(dec_of({comp(0, 2, 1, TailKind::none)}, 1)) == 16);
    CHECK(fiber(dec_of({comp(2, 2, 1, TailKind::none)}, 3)) == 16);

    // hyperbolic plane at an odd scale drops to twelve
    CHECK(fiber(dec_of({comp(1, 2, 1, TailKind::none)}, 1)) == 12);
    CHECK(fiber(dec_of({comp(3, 2, 1, TailKind::none)}, 3)) == 12);

    // anisotropic pairs at an even scale
    CHECK(fiber(dec_of({comp(0, 2, 0, TailKind::A_1_2b_1, 0, 0)}, 1)) == 32);
    CHECK(fiber(dec_of({comp(0, 2, 0, TailKind::A_1_2b_1, 0, 1)}, 1)) == 32);
    CHECK(fiber(dec_of({comp(0, 2, 0, TailKind::A_2delta_2b_1, 0, 0)}, 1)) == 16);
    CHECK(fiber(dec_of({comp(0, 2, 0, TailKind::A_2delta_2b_1, 0, 1)}, 1)) == 48);

    // free pairs at an odd scale
    CHECK(fiber(dec_of({comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 1)}, 1)) == 32);
    CHECK(fiber(dec_of({comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 0)}, 3)) == 32);
}

TEST_CASE("rank three bound lattice matches the worked value") {
    CHECK(fiber(dec_of({comp(0, 1, 0, TailKind::unit, 1),
                        comp(1, 2, 1, TailKind::none)}, 1)) == 768);
    CHECK(fiber(dec_of({comp(0, 1, 0, TailKind::unit, 3),
                        comp(1, 2, 1, TailKind::none)}, 3)) == 768);
}

TEST_CASE("enumeration agrees with the closed formula across shapes") {
    std::vector<std::vector<JordanComponent>> cases = {
        {comp(0, 1, 0, TailKind::unit, 1)},
        {comp(0, 1, 0, TailKind::unit, 7)},
        {comp(2, 1, 0, TailKind::unit, 1)},
        {comp(0, 2, 1, TailKind::none)},
        {comp(1, 2, 1, TailKind::none)},
        {comp(0, 2, 0, TailKind::A_1_2b_1, 0, 0)},
        {comp(0, 2, 0, TailKind::A_1_2b_1, 0, 1)},
        {comp(0, 2, 0, TailKind::A_2delta_2b_1, 0, 0)},
        {comp(0, 2, 0, TailKind::A_2delta_2b_1, 0, 1)},
        {comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 0)},
        {comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 1)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(2, 1, 0, TailKind::unit, 1)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(4, 1, 0, TailKind::unit, 3)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(1, 2, 1, TailKind::none)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(2, 2, 1, TailKind::none)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(3, 2, 1, TailKind::none)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(2, 2, 0, TailKind::A_2delta_2b_1, 0, 1)},
        {comp(0, 3, 1, TailKind::unit, 1)},
        {comp(1, 2, 1, TailKind::none), comp(2, 1, 0, TailKind::unit, 3)},
        {comp(1, 2, 1, TailKind::none), comp(4, 1, 0, TailKind::unit, 1)},
        {comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 0), comp(2, 1, 0, TailKind::unit, 5)},
    };
    for (uint32_t dl : {1u, 3u}) {
        for (const auto& cs : cases) {
            JordanDecomposition d = dec_of(cs, dl);
            CAPTURE(dl);
            CAPTURE(cs[0].scale);
            CAPTURE(cs.size());
            CHECK(fiber(d) == special_fiber_count(classify(d)));
        }
    }
}

TEST_CASE("fiber count is an isometry invariant") {
    // conjugating scrambles the gram and often re-splits with an anisotropic
    // tail at the bound odd scale; the count must not notice
    std::vector<JordanComponent> comps = {comp(0, 1, 0, TailKind::unit, 1),
                                          comp(1, 2, 1, TailKind::none)};
    BMatrix nf = assemble_normal_form(comps, kDefaultPrecision, 1);
    HermitianGram G = HermitianGram::from_matrix(nf);
    int tailed_splits = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        JordanDecomposition d = jordan_split(random_isometry_conjugate(G, seed));
        for (const auto& c : d.comps)
            if (c.scale == 1 && c.tail != TailKind::none) ++tailed_splits;
        CAPTURE(seed);
        CHECK(fiber(d) == 768);
    }
    // the scramble must actually have exercised the renormalization path
    CHECK(tailed_splits > 0);
}

TEST_CASE("component counting subgroups have four points split two and two") {
    // even scale, rank one
    CHECK(check_fj_equations(dec_of({comp(0, 1, 0, TailKind::unit, 1)}, 1), 0) == 4);
    CHECK(check_fj_equations(dec_of({comp(0, 1, 0, TailKind::unit, 5)}, 3), 0) == 4);

    // even scale, rank two with a norm-one vector
    CHECK(check_fj_equations(dec_of({comp(0, 2, 0, TailKind::A_1_2b_1, 0, 1)}, 1), 0) == 4);

    // odd scale, free pair
    CHECK(check_fj_equations(dec_of({comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 0)}, 1), 1) == 4);
    CHECK(check_fj_equations(dec_of({comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 1)}, 3), 1) == 4);

    // the window still holds with the counted scale next to a type II scale
    CHECK(check_fj_equations(dec_of({comp(0, 1, 0, TailKind::unit, 1),
                                     comp(1, 2, 1, TailKind::none)}, 1), 0) == 4);
}

TEST_CASE("scales outside the counting window are rejected") {
    // a type II odd scale carries no such subgroup
    CHECK_THROWS_AS(check_fj_equations(dec_of({comp(1, 2, 1, TailKind::none)}, 1), 1),
                    std::domain_error);
    // the bound odd scale next to a type I even scale fails the window
    CHECK_THROWS_AS(check_fj_equations(dec_of({comp(0, 1, 0, TailKind::unit, 1),
                                               comp(1, 2, 1, TailKind::none)}, 1), 1),
                    std::domain_error);
    // absent scale
    CHECK_THROWS_AS(check_fj_equations(dec_of({comp(0, 1, 0, TailKind::unit, 1)}, 1), 2),
                    std::domain_error);
}

TEST_CASE("fiber points are closed under multiplication") {
    std::vector<std::vector<JordanComponent>> cases = {
        {comp(0, 1, 0, TailKind::unit, 1)},
        {comp(0, 2, 0, TailKind::A_1_2b_1, 0, 1)},
        {comp(1, 2, 1, TailKind::none)},
        {comp(1, 2, 0, TailKind::A_4a_2delta_pi, 0, 0, 0)},
        {comp(0, 1, 0, TailKind::unit, 1), comp(1, 2, 1, TailKind::none)},
    };
    for (const auto& cs : cases) {
        JordanDecomposition d = dec_of(cs, 1);
        CHECK_NOTHROW(fiber_closure_check(d, 64, 0));
    }
}

TEST_CASE("ranks past the supported bound are refused honestly") {
    JordanDecomposition d = dec_of({comp(0, 1, 0, TailKind::unit, 1),
                                    comp(1, 2, 1, TailKind::none),
                                    comp(2, 1, 0, TailKind::unit, 3)}, 1);
    CHECK_THROWS_AS(enumerate_fiber_points(d), capability_error);
    CHECK_THROWS_AS(fiber_closure_check(d, 8, 0), capability_error);
}

TEST_CASE("a tight budget reports a partial enumeration") {
    FiberLimits lim;
    lim.max_points = 1000;
    JordanDecomposition d = dec_of({comp(0, 1, 0, TailKind::unit, 1),
                                    comp(1, 2, 1, TailKind::none)}, 1);
    FiberResult r = enumerate_fiber_points(d, lim);
    CHECK(r.partial);
    CHECK(r.enumerated == 1000);
    CHECK(r.count <= 768);
}

TEST_CASE("the empty lattice has a single fiber point") {
    JordanDecomposition d = dec_of({}, 1);
    FiberResult r = enumerate_fiber_points(d);
    CHECK(r.count == 1);
    CHECK_FALSE(r.partial);
}
