/* End-to-end acceptance run: eight checks, one line each, exit 0 only when
 * every line passes.  Everything here goes through the public headers the
 * way an external caller would. */

#include <chrono>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "hermdens/density.hpp"
#include "hermdens/errors.hpp"
#include "hermdens/fiber.hpp"
#include "hermdens/io.hpp"
#include "hermdens/naive.hpp"
#include "hermdens/sublattices.hpp"

using namespace hermdens;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, const char* name, bool pass, double secs, const std::string& detail) {
    std::printf("%d %-42s %s (%.2fs)%s%s\n", idx, name, pass ? "PASS" : "FAIL", secs,
                detail.empty() ? "" : "  ", detail.c_str());
    if (!pass) ++failures;
}

uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4b08dull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

LatticeFile rank_one_unit() {
    LatticeFile lf;
    lf.delta = 1;
    BMatrix g = BMatrix::zeros(1, 1, kDefaultPrecision, 1);
    g.set(0, 0, RamifiedElem::one(kDefaultPrecision, 1));
    lf.gram = g;
    return lf;
}

void criterion_rank_one_density() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        LatticeFile lf = rank_one_unit();
        DensityReport r = local_density(profile_of(lf));
        FiberResult fr = enumerate_fiber_points(decomposition_of(lf));
        pass = r.beta_L == 2 && r.fiber_count == 4 && !fr.partial && fr.count == 4;
        detail = "beta_L=" + r.beta_L.get_str() + " fiber=" + fr.count.get_str();
    } catch (const std::exception& e) {
        detail = e.what();
    }
    double s = t.seconds();
    report(1, "rank-one density and fiber points", pass && s < 1.0, s, detail);
}

void criterion_rank_one_ratio_sequence() {
    Timer t;
    bool pass = false;
    std::string detail;
    try {
        LatticeFile lf = rank_one_unit();
        CountSequence cs = density_estimate(HermitianGram::from_matrix(*lf.gram), 5);
        const std::vector<mpq_class> want = {1, 1, 2, 2, 2};
        pass = cs.ratios.size() == want.size() && cs.stabilized && cs.density == 2;
        for (size_t i = 0; pass && i < want.size(); ++i) pass = cs.ratios[i] == want[i];
        detail = "ratios";
        for (const auto& r : cs.ratios) detail += " " + r.get_str();
    } catch (const std::exception& e) {
        detail = e.what();
    }
    double s = t.seconds();
    report(2, "naive ratio sequence of the unit lattice", pass && s < 1.0, s, detail);
}

void criterion_naive_agrees_on_corpus() {
    Timer t;
    bool pass = true;
    std::string detail;
    try {
        std::vector<LatticeFile> corpus = corpus_generate(3, 24, 2, 3);
        std::set<TailKind> tails;
        std::set<uint32_t> deltas;
        int checked = 0;
        for (const auto& lf : corpus) {
            HermitianGram G = HermitianGram::from_matrix(*lf.gram);
            TypeProfile p = profile_of(lf);
            for (const auto& st : p.scales) tails.insert(st.tail);
            deltas.insert(lf.delta);
            DensityReport r = local_density(p);
            CountSequence cs = density_estimate(G, 8);
            if (!cs.stabilized || cs.density != r.beta_L) {
                pass = false;
                detail = "mismatch on corpus entry " + std::to_string(checked);
                break;
            }
            ++checked;
        }
        if (pass) {
            pass = checked >= 20 && deltas.size() == 2 && tails.count(TailKind::unit) &&
                   tails.count(TailKind::A_1_2b_1) && tails.count(TailKind::A_2delta_2b_1) &&
                   tails.count(TailKind::A_4a_2delta_pi);
            detail = std::to_string(checked) + " lattices, " +
                     std::to_string(tails.size()) + " tail kinds";
        }
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    double s = t.seconds();
    report(3, "naive counting matches the formula", pass && s < 600.0, s, detail);
}

void criterion_fiber_agrees_on_corpus() {
    Timer t;
    bool pass = true;
    std::string detail;
    try {
        std::vector<LatticeFile> corpus = corpus_generate(4, 20, 3, 2);
        int checked = 0;
        for (const auto& lf : corpus) {
            JordanDecomposition dec = decomposition_of(lf);
            DensityReport r = local_density(profile_of(lf));

            // the closed product the enumeration must reproduce
            mpz_class expected = 1;
            mpz_mul_2exp(expected.get_mpz_t(), expected.get_mpz_t(), (unsigned long)r.beta);
            mpz_class fl = 1;
            mpz_class f = 1 << r.f_degree;
            mpz_pow_ui(fl.get_mpz_t(), f.get_mpz_t(), (unsigned long)r.l_unipotent);
            expected *= fl;
            for (const auto& ord : r.factor_orders) expected *= ord;

            FiberResult fr = enumerate_fiber_points(dec);
            if (fr.partial || fr.count != expected || expected != r.fiber_count) {
                pass = false;
                detail = "mismatch on corpus entry " + std::to_string(checked) + ": " +
                         fr.count.get_str() + " vs " + expected.get_str();
                break;
            }
            ++checked;
        }
        if (pass) detail = std::to_string(checked) + " lattices";
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    double s = t.seconds();
    report(4, "fiber enumeration matches the formula", pass && s < 300.0, s, detail);
}

void criterion_group_orders() {
    Timer t;
    bool pass = true;
    std::string detail = "8 groups";
    try {
        std::vector<ReductiveFactor> gs = {
            {GroupKind::symplectic, 2, 0, 0},      {GroupKind::symplectic, 4, 0, 0},
            {GroupKind::even_orthogonal, 2, +1, 0}, {GroupKind::even_orthogonal, 2, -1, 0},
            {GroupKind::even_orthogonal, 4, +1, 0}, {GroupKind::even_orthogonal, 4, -1, 0},
            {GroupKind::odd_orthogonal, 1, 0, 0},  {GroupKind::odd_orthogonal, 3, 0, 0},
        };
        for (const auto& g : gs) {
            if (classical_group_order(g, 2) != brute_group_order(g)) {
                pass = false;
                detail = "order mismatch for " + g.name();
                break;
            }
        }
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(5, "classical group orders vs brute force", pass, t.seconds(), detail);
}

void criterion_exponent_identities() {
    Timer t;
    bool pass = true;
    std::string detail;
    uint64_t rng = 0xacceb7ull;
    try {
        for (int trial = 0; trial < 1000 && pass; ++trial) {
            std::vector<JordanComponent> comps;
            int scale = -4 + (int)(splitmix64(rng) % 4);
            const int blocks = 1 + (int)(splitmix64(rng) % 3);
            for (int b = 0; b < blocks; ++b) {
                JordanComponent c;
                c.scale = scale;
                const bool even = ((scale % 2) + 2) % 2 == 0;
                const uint64_t r = splitmix64(rng);
                const int hyp = (int)(r % 2);
                c.hyperbolic_count = hyp;
                switch ((r >> 8) % (even ? 4 : 2)) {
                    case 0: c.tail = TailKind::none; c.hyperbolic_count = hyp + 1; break;
                    case 1:
                        c.tail = even ? TailKind::unit : TailKind::A_4a_2delta_pi;
                        c.unit_a = 1 + 2 * (uint32_t)((r >> 16) % 4);
                        c.a_param = (int64_t)((r >> 16) % 2);
                        break;
                    case 2: c.tail = TailKind::A_1_2b_1; c.b_param = (int64_t)((r >> 16) % 3); break;
                    default: c.tail = TailKind::A_2delta_2b_1; c.b_param = 1; break;
                }
                c.rank = 2 * c.hyperbolic_count + c.tail_rank();
                comps.push_back(c);
                scale += 1 + (int)(splitmix64(rng) % 3);
            }
            const int f_degree = 1 + (int)(splitmix64(rng) % 3);
            TypeProfile p = classify_components(comps, f_degree);
            DensityReport r = local_density(p);  // cross-checks N both ways itself
            long type_I = 0;
            for (const auto& st : p.scales)
                if (st.type_I()) ++type_I;
            long dims = r.l_unipotent;
            for (const auto& g : r.factors) dims += classical_group_dim(g);
            pass = r.N == r.N_H - r.N_M && r.l_unipotent == r.l_prime + r.dim_G1 &&
                   r.l_unipotent >= 0 && r.l_prime >= 0 && r.dim_G1 >= 0 &&
                   r.beta <= type_I && dims == (long)p.n * p.n;
            if (!pass) detail = "identity broke at trial " + std::to_string(trial);
        }
        if (pass) detail = "1000 profiles";
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(6, "exponent identities on random profiles", pass, t.seconds(), detail);
}

void criterion_invariance() {
    Timer t;
    bool pass = true;
    std::string detail;
    uint64_t rng = 0xcafe5ull;
    try {
        std::vector<LatticeFile> corpus = corpus_generate(7, 20, 3, 2);
        int conjugations = 0;
        for (const auto& lf : corpus) {
            HermitianGram G = HermitianGram::from_matrix(*lf.gram);
            TypeProfile base = profile_of(lf);
            mpq_class base_density = local_density(base).beta_L;
            for (int rep = 0; rep < 5 && pass; ++rep) {
                HermitianGram Gc = random_isometry_conjugate(G, splitmix64(rng) | 1ull);
                TypeProfile p = classify(jordan_split(Gc));
                bool same = p.scales.size() == base.scales.size();
                for (size_t q = 0; same && q < p.scales.size(); ++q)
                    same = p.scales[q].scale == base.scales[q].scale &&
                           p.scales[q].rank == base.scales[q].rank &&
                           p.scales[q].tag == base.scales[q].tag &&
                           p.scales[q].bound == base.scales[q].bound;
                if (!same || local_density(p).beta_L != base_density) {
                    pass = false;
                    detail = "conjugation changed the invariants";
                }
                ++conjugations;
            }
            if (!pass) break;

            // rescaling by xi shifts every scale up by two, types unchanged
            RamifiedElem xi = RamifiedElem::from_int(-2 * (int64_t)lf.delta,
                                                     G.K(), G.delta());
            TypeProfile shifted =
                classify(jordan_split(HermitianGram::from_matrix(scalar_mul(xi, G.m))));
            bool same = shifted.scales.size() == base.scales.size();
            for (size_t q = 0; same && q < shifted.scales.size(); ++q)
                same = shifted.scales[q].scale == base.scales[q].scale + 2 &&
                       shifted.scales[q].rank == base.scales[q].rank &&
                       shifted.scales[q].tag == base.scales[q].tag;
            if (!same) {
                pass = false;
                detail = "rescaling by xi did not shift scales by two";
                break;
            }
        }
        if (pass) detail = std::to_string(conjugations) + " conjugations and 20 rescalings";
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(7, "invariance under conjugation and rescaling", pass, t.seconds(), detail);
}

void criterion_sublattice_dimensions() {
    Timer t;
    bool pass = true;
    std::string detail;
    try {
        int rows = 0;
        for (uint64_t seed : {uint64_t{4}, uint64_t{7}}) {
            std::vector<LatticeFile> corpus = corpus_generate(seed, 20, 3, 2);
            for (const auto& lf : corpus) {
                JordanDecomposition dec = decomposition_of(lf);
                TypeProfile p = profile_of(lf);
                for (const auto& d : invariant_sublattices(dec)) {
                    SublatticeDims want = predicted_sublattice_dims(p, d.scale);
                    if (d.dim_A_mod_B != want.dim_A_mod_B ||
                        d.dim_W_mod_X != want.dim_W_mod_X ||
                        d.dim_B_mod_Z != want.dim_B_mod_Z ||
                        d.dim_B_mod_Y != want.dim_B_mod_Y) {
                        pass = false;
                        detail = "dimension table differs at scale " + std::to_string(d.scale);
                    }
                    ++rows;
                }
                if (!pass) break;
            }
            if (!pass) break;
        }
        if (pass) detail = std::to_string(rows) + " scale rows";
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(8, "sublattice dimension tables", pass, t.seconds(), detail);
}

} // namespace

int main() {
    criterion_rank_one_density();
    criterion_rank_one_ratio_sequence();
    criterion_naive_agrees_on_corpus();
    criterion_fiber_agrees_on_corpus();
    criterion_group_orders();
    criterion_exponent_identities();
    criterion_invariance();
    criterion_sublattice_dimensions();
    if (failures == 0) {
        std::puts("all acceptance checks passed");
        return 0;
    }
    std::printf("%d acceptance check(s) failed\n", failures);
    return 1;
}
