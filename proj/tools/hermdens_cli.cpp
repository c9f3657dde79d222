#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "hermdens/density.hpp"
#include "hermdens/errors.hpp"
#include "hermdens/fiber.hpp"
#include "hermdens/io.hpp"
#include "hermdens/naive.hpp"
#include "hermdens/sublattices.hpp"

using namespace hermdens;
using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitCapability = 4;
constexpr int kExitVerification = 5;

constexpr int kNaiveRankCap = 2;

int degree_of_field_size(int f_size) {
    if (f_size < 2 || (f_size & (f_size - 1)) != 0)
        throw std::invalid_argument("--f takes the residue field size, a power of two >= 2");
    int d = 0;
    while ((1 << d) < f_size) ++d;
    return d;
}

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

json check_to_json(const CheckResult& c) {
    return json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
}

json counts_to_json(const CountSequence& cs) {
    json counts = json::array();
    json ratios = json::array();
    for (const auto& c : cs.counts) counts.push_back(c.get_str());
    for (const auto& r : cs.ratios) ratios.push_back(r.get_str());
    return json{{"counts", std::move(counts)},
                {"ratios", std::move(ratios)},
                {"stabilized", cs.stabilized},
                {"stable_level", cs.stable_level},
                {"density", cs.density.get_str()}};
}

void require_gram(const LatticeFile& lf, const std::string& what) {
    if (!lf.has_gram())
        throw capability_error(what + ": profile-only input carries no gram to count");
}

int run_jordan(const LatticeFile& lf, bool as_json) {
    JordanDecomposition dec = decomposition_of(lf);
    if (as_json)
        std::cout << json{{"decomposition", decomposition_to_json(dec)}}.dump(2) << "\n";
    else
        std::cout << decomposition_to_text(dec);
    return 0;
}

int run_classify(const LatticeFile& lf, bool as_json) {
    TypeProfile p = profile_of(lf);
    if (as_json)
        std::cout << json{{"profile", profile_to_json(p)}}.dump(2) << "\n";
    else
        std::cout << profile_to_text(p);
    return 0;
}

int run_density(const LatticeFile& lf, int f_size, bool as_json) {
    TypeProfile p = profile_of(lf);
    if (f_size > 0) p.f_degree = degree_of_field_size(f_size);
    DensityReport r = local_density(p);
    if (as_json)
        std::cout << json{{"profile", profile_to_json(p)},
                          {"density", density_report_to_json(r)}}.dump(2)
                  << "\n";
    else
        std::cout << density_report_to_text(r);
    return 0;
}

int run_verify_naive(const LatticeFile& lf, int kmax, bool as_json) {
    require_gram(lf, "verify naive");
    HermitianGram G = HermitianGram::from_matrix(*lf.gram);
    if (G.n > kNaiveRankCap)
        throw capability_error("verify naive: rank " + std::to_string(G.n) +
                               " exceeds the exhaustive-counting budget (max " +
                               std::to_string(kNaiveRankCap) + ")");
    DensityReport expected = local_density(profile_of(lf));
    CountSequence cs = density_estimate(G, kmax);
    const bool pass = cs.stabilized && cs.density == expected.beta_L;
    if (as_json) {
        std::cout << json{{"naive", counts_to_json(cs)},
                          {"expected", expected.beta_L.get_str()},
                          {"pass", pass}}.dump(2)
                  << "\n";
    } else {
        std::cout << "naive counting up to 2^" << kmax << "\n";
        std::cout << "  k  count  ratio\n";
        for (size_t i = 0; i < cs.counts.size(); ++i)
            std::cout << "  " << (i + 1) << "  " << cs.counts[i].get_str() << "  "
                      << cs.ratios[i].get_str() << "\n";
        std::cout << "  stabilized: " << (cs.stabilized ? "yes" : "no")
                  << ", density " << cs.density.get_str() << ", formula "
                  << expected.beta_L.get_str() << "\n";
        std::cout << (pass ? "pass\n" : "MISMATCH\n");
    }
    if (!pass)
        throw verification_error("verify naive: counted density " + cs.density.get_str() +
                                 " does not match the formula " + expected.beta_L.get_str());
    return 0;
}

int run_verify_fiber(const LatticeFile& lf, bool as_json) {
    JordanDecomposition dec = decomposition_of(lf);
    mpz_class expected = special_fiber_count(classify(dec));
    FiberResult fr = enumerate_fiber_points(dec);
    const bool pass = !fr.partial && fr.count == expected;
    if (as_json) {
        std::cout << json{{"fiber", json{{"count", fr.count.get_str()},
                                         {"enumerated", fr.enumerated},
                                         {"partial", fr.partial}}},
                          {"expected", expected.get_str()},
                          {"pass", pass}}.dump(2)
                  << "\n";
    } else {
        std::cout << "fiber enumeration: " << fr.count.get_str() << " points ("
                  << fr.enumerated << " candidates tried), formula "
                  << expected.get_str() << "\n";
        std::cout << (pass ? "pass\n" : "MISMATCH\n");
    }
    if (!pass)
        throw verification_error("verify fiber: enumerated " + fr.count.get_str() +
                                 " points but the formula gives " + expected.get_str());
    return 0;
}

int run_corpus(uint64_t seed, int count, int max_rank, int max_scale,
               const std::string& out_dir, bool as_json) {
    std::vector<LatticeFile> files = corpus_generate(seed, count, max_rank, max_scale);
    if (as_json) {
        json arr = json::array();
        for (const auto& lf : files) arr.push_back(lattice_to_json(lf));
        std::cout << arr.dump(2) << "\n";
        return 0;
    }
    std::filesystem::create_directories(out_dir);
    for (size_t i = 0; i < files.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "lat_%03zu.json", i);
        const std::string path = out_dir + "/" + name;
        save_lattice(files[i], path);
        const int n = files[i].gram ? files[i].gram->rows : 0;
        std::cout << "wrote " << path << "  delta=" << files[i].delta << " rank=" << n << "\n";
    }
    return 0;
}

int run_check_all(const LatticeFile& lf, bool as_json) {
    std::vector<CheckResult> checks;
    json report;
    report["input"] = lattice_to_json(lf);

    TypeProfile p = profile_of(lf);
    report["profile"] = profile_to_json(p);
    DensityReport r = local_density(p);
    report["density"] = density_report_to_json(r);

    long type_I_scales = 0;
    for (const auto& st : p.scales)
        if (st.type_I()) ++type_I_scales;
    long factor_dims = 0;
    for (const auto& g : r.factors) factor_dims += classical_group_dim(g);
    checks.push_back({"exponent identities",
                      r.N == r.N_H - r.N_M && r.l_unipotent == r.l_prime + r.dim_G1 &&
                          r.l_unipotent >= 0 && r.l_prime >= 0 && r.dim_G1 >= 0 &&
                          r.beta <= type_I_scales &&
                          r.l_unipotent + factor_dims == (long)p.n * p.n,
                      "N, l, beta and dimension bookkeeping"});

    const bool gram_level = lf.has_gram() || lf.f_degree == 1;
    if (gram_level) {
        JordanDecomposition dec = decomposition_of(lf);
        report["decomposition"] = decomposition_to_json(dec);

        std::vector<SublatticeDims> dims = invariant_sublattices(dec);
        report["sublattices"] = sublattice_dims_to_json(dims);
        bool dims_ok = true;
        for (const auto& d : dims) {
            SublatticeDims want = predicted_sublattice_dims(p, d.scale);
            if (d.dim_A_mod_B != want.dim_A_mod_B || d.dim_W_mod_X != want.dim_W_mod_X ||
                d.dim_B_mod_Z != want.dim_B_mod_Z || d.dim_B_mod_Y != want.dim_B_mod_Y)
                dims_ok = false;
        }
        checks.push_back({"sublattice dimensions", dims_ok, "direct linear algebra vs closed forms"});

        if (p.n <= 3) {
            FiberResult fr = enumerate_fiber_points(dec);
            report["fiber"] = json{{"count", fr.count.get_str()},
                                   {"enumerated", fr.enumerated},
                                   {"partial", fr.partial}};
            checks.push_back({"fiber enumeration", !fr.partial && fr.count == r.fiber_count,
                              fr.count.get_str() + " vs " + r.fiber_count.get_str()});
        }
    }

    if (lf.has_gram()) {
        HermitianGram G = HermitianGram::from_matrix(*lf.gram);
        if (G.n <= kNaiveRankCap) {
            CountSequence cs = density_estimate(G, 8);
            report["naive"] = counts_to_json(cs);
            checks.push_back({"naive counting", cs.stabilized && cs.density == r.beta_L,
                              cs.density.get_str() + " vs " + r.beta_L.get_str()});
        }
    }

    bool all_pass = true;
    json jchecks = json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        jchecks.push_back(check_to_json(c));
    }
    report["checks"] = std::move(jchecks);
    report["pass"] = all_pass;

    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << profile_to_text(p) << density_report_to_text(r);
        for (const auto& c : checks)
            std::cout << (c.pass ? "  pass  " : "  FAIL  ") << c.name << " (" << c.detail << ")\n";
    }
    if (!all_pass) throw verification_error("check-all: a cross-check failed");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"local densities of dyadic hermitian lattices"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    std::string in_path;
    auto* jordan_cmd = app.add_subcommand("jordan", "normal form of a lattice file");
    jordan_cmd->add_option("file", in_path, "lattice file")->required();

    auto* classify_cmd = app.add_subcommand("classify", "per-scale type profile");
    classify_cmd->add_option("file", in_path, "lattice file")->required();

    int f_size = 0;
    auto* density_cmd = app.add_subcommand("density", "local density report");
    density_cmd->add_option("file", in_path, "lattice file")->required();
    density_cmd->add_option("--f", f_size, "residue field size (power of two)");

    auto* verify_cmd = app.add_subcommand("verify", "cross-check the formula against an oracle");
    verify_cmd->require_subcommand(1);
    int kmax = 6;
    auto* naive_cmd = verify_cmd->add_subcommand("naive", "count automorphisms mod 2^k");
    naive_cmd->add_option("file", in_path, "lattice file")->required();
    naive_cmd->add_option("--kmax", kmax, "highest modulus exponent")->required();
    auto* fiber_cmd = verify_cmd->add_subcommand("fiber", "enumerate the special fiber");
    fiber_cmd->add_option("file", in_path, "lattice file")->required();

    uint64_t seed = 1;
    int count = 12, max_rank = 3, max_scale = 2;
    std::string out_dir = "corpus";
    auto* corpus_cmd = app.add_subcommand("corpus", "generate a deterministic lattice corpus");
    corpus_cmd->add_option("--seed", seed, "generator seed");
    corpus_cmd->add_option("--count", count, "number of lattices");
    corpus_cmd->add_option("--max-rank", max_rank, "largest total rank");
    corpus_cmd->add_option("--max-scale", max_scale, "largest Jordan scale");
    corpus_cmd->add_option("--out", out_dir, "output directory");

    auto* check_cmd = app.add_subcommand("check-all", "density plus every applicable oracle");
    check_cmd->add_option("file", in_path, "lattice file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    try {
        if (*jordan_cmd) return run_jordan(load_lattice(in_path), as_json);
        if (*classify_cmd) return run_classify(load_lattice(in_path), as_json);
        if (*density_cmd) return run_density(load_lattice(in_path), f_size, as_json);
        if (*naive_cmd) return run_verify_naive(load_lattice(in_path), kmax, as_json);
        if (*fiber_cmd) return run_verify_fiber(load_lattice(in_path), as_json);
        if (*corpus_cmd) return run_corpus(seed, count, max_rank, max_scale, out_dir, as_json);
        if (*check_cmd) return run_check_all(load_lattice(in_path), as_json);
    } catch (const precision_error& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return kExitPrecision;
    } catch (const capability_error& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const verification_error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
