#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "hermdens/density.hpp"
#include "hermdens/errors.hpp"
#include "hermdens/io.hpp"

using namespace hermdens;
using nlohmann::json;

namespace {

json gram_file_json() {
    return json::parse(R"({
        "format_version": 1, "delta": 1, "precision_bits": 16,
        "gram": [[{"a": 1, "b": 0}, {"a": 1, "b": 0}],
                 [{"a": 1, "b": 0}, {"a": 2, "b": 0}]]
    })");
}

json profile_file_json() {
    return json::parse(R"({
        "format_version": 1, "delta": 3, "precision_bits": 16,
        "profile": {"f": 1, "components": [
            {"scale": 0, "rank": 1, "tail": "unit", "params": {"unit_a": 3}},
            {"scale": 1, "rank": 2, "tail": "none", "params": {}}
        ]}
    })");
}

} // namespace

TEST_CASE("lattice files round trip through json") {
    for (const json& j : {gram_file_json(), profile_file_json()}) {
        LatticeFile lf = lattice_from_json(j);
        json emitted = lattice_to_json(lf);
        LatticeFile again = lattice_from_json(emitted);
        CHECK(lattice_to_json(again) == emitted);
    }

    // overrides survive the loop too
    json j = profile_file_json();
    j["profile"]["components"] = json::array(
        {json{{"scale", 0}, {"rank", 2}, {"tail", "none"}, {"params", json::object()}}});
    j["profile"]["f"] = 2;
    j["profile"]["bbar_overrides"] = json{{"0", 2}};
    LatticeFile lf = lattice_from_json(j);
    CHECK(lf.bbar_overrides.at(0) == 2);
    CHECK(lattice_to_json(lattice_from_json(lattice_to_json(lf))) == lattice_to_json(lf));
}

TEST_CASE("malformed lattice files are rejected with a reason") {
    json j = gram_file_json();
    j["profile"] = profile_file_json()["profile"];
    CHECK_THROWS_AS(lattice_from_json(j), std::invalid_argument);  // both forms

    j = gram_file_json();
    j.erase("gram");
    CHECK_THROWS_AS(lattice_from_json(j), std::invalid_argument);  // neither form

    j = gram_file_json();
    j["delta"] = 2;
    CHECK_THROWS_AS(lattice_from_json(j), std::invalid_argument);

    j = gram_file_json();
    j["gram"][0][1]["a"] = 0;  // breaks the hermitian symmetry
    CHECK_THROWS_AS(lattice_from_json(j), std::invalid_argument);

    j = profile_file_json();
    j["profile"]["components"][0]["rank"] = 2;  // unit tail cannot fill rank 2
    CHECK_THROWS_AS(lattice_from_json(j), std::invalid_argument);

    j = profile_file_json();
    j["profile"]["components"][0]["tail"] = "A_7";
    CHECK_THROWS_AS(lattice_from_json(j), std::invalid_argument);

    j = profile_file_json();
    j["profile"]["bbar_overrides"] = json{{"4", 1}};
    CHECK_THROWS_AS(profile_of(lattice_from_json(j)), std::invalid_argument);
}

TEST_CASE("gram files resolve through the splitter") {
    LatticeFile lf = lattice_from_json(gram_file_json());
    JordanDecomposition dec = decomposition_of(lf);
    REQUIRE(dec.comps.size() == 1);
    CHECK(dec.comps[0].scale == 0);
    CHECK(dec.comps[0].tail == TailKind::A_1_2b_1);

    TypeProfile p = profile_of(lf);
    CHECK(p.n == 2);
    CHECK(p.scales[0].tag == TypeTag::I_even_rank);
    CHECK(local_density(p).beta_L == 2);
}

TEST_CASE("profile files resolve directly") {
    LatticeFile lf = lattice_from_json(profile_file_json());
    JordanDecomposition dec = decomposition_of(lf);
    CHECK(dec.delta == 3);
    CHECK(dec.comps.size() == 2);
    CHECK(local_density(profile_of(lf)).beta_L == 12);
}

TEST_CASE("symbolic residue fields stay formula-only") {
    json j = profile_file_json();
    j["profile"]["f"] = 2;
    LatticeFile lf = lattice_from_json(j);
    CHECK_THROWS_AS(decomposition_of(lf), capability_error);
    CHECK(profile_of(lf).f_degree == 2);
}

TEST_CASE("bbar overrides steer the splitness of even type II scales") {
    json j = profile_file_json();
    j["profile"]["components"] = json::array(
        {json{{"scale", 0}, {"rank", 2}, {"tail", "none"}, {"params", json::object()}}});
    j["profile"]["f"] = 2;

    DensityReport plain = local_density(profile_of(lattice_from_json(j)));
    REQUIRE(plain.factors.size() == 1);
    CHECK(plain.factors[0].sign == +1);
    CHECK(plain.beta_L == 24);

    // element with nonzero absolute trace: the plane goes nonsplit
    j["profile"]["bbar_overrides"] = json{{"0", 2}};
    DensityReport flipped = local_density(profile_of(lattice_from_json(j)));
    CHECK(flipped.factors[0].sign == -1);
    CHECK(flipped.beta_L == 40);
}

TEST_CASE("corpus generation is deterministic and covers the tails") {
    std::vector<LatticeFile> a = corpus_generate(17, 16, 3, 2);
    std::vector<LatticeFile> b = corpus_generate(17, 16, 3, 2);
    REQUIRE(a.size() == 16);
    REQUIRE(b.size() == 16);
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(lattice_to_json(a[i]) == lattice_to_json(b[i]));

    CHECK(lattice_to_json(corpus_generate(18, 16, 3, 2)[15]) != lattice_to_json(a[15]));

    std::set<TailKind> seen;
    std::set<uint32_t> deltas;
    bool saw_hyperbolic = false;
    for (const auto& lf : a) {
        REQUIRE(lf.has_gram());
        HermitianGram G = HermitianGram::from_matrix(*lf.gram);
        CHECK(validate_gram(G).ok);
        deltas.insert(lf.delta);
        for (const auto& c : jordan_split(G).comps) {
            seen.insert(c.tail);
            if (c.hyperbolic_count > 0) saw_hyperbolic = true;
        }
    }
    CHECK(seen.count(TailKind::unit) == 1);
    CHECK(seen.count(TailKind::A_1_2b_1) == 1);
    CHECK(seen.count(TailKind::A_2delta_2b_1) == 1);
    CHECK(seen.count(TailKind::A_4a_2delta_pi) == 1);
    CHECK(saw_hyperbolic);
    CHECK(deltas == std::set<uint32_t>{1, 3});
}

TEST_CASE("corpus scrambling changes the gram but not the lattice") {
    std::vector<LatticeFile> files = corpus_generate(5, 8, 2, 1);
    int scrambled = 0;
    for (const auto& lf : files) {
        JordanDecomposition dec = jordan_split(HermitianGram::from_matrix(*lf.gram));
        BMatrix nf = assemble_normal_form(dec.comps, dec.K, dec.delta);
        // a scrambled file differs from its own normal form entry-wise
        if (!(reduce_precision(*lf.gram, dec.K) == reduce_precision(nf, dec.K))) ++scrambled;
    }
    CHECK(scrambled >= 2);
    CHECK(scrambled <= 6);
}

TEST_CASE("report serializers carry the whole exponent ledger") {
    LatticeFile lf = lattice_from_json(profile_file_json());
    TypeProfile p = profile_of(lf);
    DensityReport r = local_density(p);

    json jr = density_report_to_json(r);
    for (const char* key : {"N_M", "N_H", "N", "a_count", "beta", "dim_G1",
                            "l_unipotent", "l_prime", "factors", "fiber_count", "beta_L"})
        CHECK(jr.contains(key));
    CHECK(jr["beta_L"] == "12");
    CHECK(jr["fiber_count"] == "768");

    std::string text = density_report_to_text(r);
    CHECK(text.find("beta_L = 12") != std::string::npos);
    CHECK(text.find("fiber points = 768") != std::string::npos);

    std::string ptext = profile_to_text(p);
    CHECK(ptext.find("n = 3") != std::string::npos);

    json pj = profile_to_json(p);
    CHECK(pj["scales"].size() == 2);
    CHECK(pj["scales"][1]["bound"] == true);
}

TEST_CASE("decomposition serializer matches the parsed profile") {
    LatticeFile lf = lattice_from_json(profile_file_json());
    JordanDecomposition dec = decomposition_of(lf);
    json dj = decomposition_to_json(dec);
    CHECK(dj["components"].size() == 2);
    CHECK(dj["components"][0]["tail"] == "unit");
    CHECK(dj["components"][1]["rank"] == 2);
}
