#include "hermdens/naive.hpp"

#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hermdens/bmatrix.hpp"
#include "hermdens/errors.hpp"
#include "hermdens/f2.hpp"

namespace hermdens {

namespace {

constexpr uint64_t kLiftBudgetPerLevel = 1ull << 24;

struct StateKey {
    std::vector<uint32_t> w;
    bool operator==(const StateKey& o) const { return w == o.w; }
};

struct StateHash {
    size_t operator()(const StateKey& k) const {
        uint64_t h = 1469598103934665603ull;
        for (uint32_t x : k.w) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return (size_t)h;
    }
};

/* One lifting class: A1 = G g, A2 = sigma^t(g) G, D = (sigma^t(g) G g - G)/2^k.
 * Two g with the same triple modulo the remaining window lift identically, so
 * only a representative is kept. */
struct State {
    BMatrix A1, A2, D;
};

StateKey make_key(const State& s, int window) {
    uint32_t m = window >= 32 ? 0xffffffffu : ((1u << window) - 1u);
    StateKey k;
    k.w.reserve(6 * s.A1.e.size());
    for (const BMatrix* M : {&s.A1, &s.A2, &s.D})
        for (const auto& x : M->e) {
            k.w.push_back(x.a & m);
            k.w.push_back(x.b & m);
        }
    return k;
}

using StateMap = std::unordered_map<StateKey, std::pair<State, mpz_class>, StateHash>;

bool invertible_mod_pi(const BMatrix& g) {
    std::vector<uint64_t> rows(g.rows, 0);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            if (g.at(r, c).a & 1u) rows[r] |= 1ull << c;
    return f2_rank(rows) == g.rows;
}

bool all_even(const BMatrix& M) {
    for (const auto& x : M.e)
        if ((x.a & 1u) || (x.b & 1u)) return false;
    return true;
}

BMatrix halve(const BMatrix& M) {
    BMatrix r = M;
    for (auto& x : r.e) {
        if ((x.a & 1u) || (x.b & 1u)) throw precision_error("halve: entry is odd");
        x.a >>= 1;
        x.b >>= 1;
    }
    return r;
}

BMatrix shift2(const BMatrix& M, int e) {
    BMatrix r = M;
    uint32_t m = precision_mask(M.K);
    for (auto& x : r.e) {
        x.a = (e >= 32 ? 0 : (x.a << e)) & m;
        x.b = (e >= 32 ? 0 : (x.b << e)) & m;
    }
    return r;
}

BMatrix decode_f2_matrix(uint64_t code, int n, int K, uint32_t delta) {
    BMatrix g = BMatrix::zeros(n, n, K, delta);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int q = (i * n + j) * 2;
            uint32_t a = (uint32_t)((code >> q) & 1);
            uint32_t b = (uint32_t)((code >> (q + 1)) & 1);
            if (a | b) g.set(i, j, RamifiedElem::make(a, b, K, delta));
        }
    return g;
}

std::vector<mpz_class> counts_up_to(const HermitianGram& G, int kmax) {
    if (kmax < 1) throw std::domain_error("naive count: level must be at least 1");
    int n = G.n;
    if (n == 0) return std::vector<mpz_class>((size_t)kmax, mpz_class(1));
    int W = 2 * n * n;
    if (W > 62) throw capability_error("naive count: rank too large to enumerate");
    int K = G.K();
    uint32_t delta = G.delta();
    if (K < kmax + 2)
        throw precision_error("naive count: needs working precision of at least kmax + 2 digits");

    std::vector<mpz_class> counts;
    StateMap cur;

    // level 1: every matrix over B/2
    mpz_class n1 = 0;
    int win1 = std::max(1, kmax - 1);
    for (uint64_t code = 0; code < (1ull << W); ++code) {
        BMatrix g = decode_f2_matrix(code, n, K, delta);
        if (!invertible_mod_pi(g)) continue;
        BMatrix X = mul(conj_transpose(g), mul(G.m, g));
        BMatrix R = sub(X, G.m);
        if (!all_even(R)) continue;
        ++n1;
        State s{mul(G.m, g), mul(conj_transpose(g), G.m), halve(R)};
        StateKey key = make_key(s, win1);
        auto it = cur.find(key);
        if (it == cur.end()) cur.emplace(std::move(key), std::make_pair(std::move(s), mpz_class(1)));
        else it->second.second += 1;
    }
    counts.push_back(n1);

    for (int k = 1; k < kmax; ++k) {
        StateMap next;
        mpz_class nk = 0;
        uint64_t spent = 0;
        int win = std::max(1, kmax - (k + 1));
        for (const auto& kv : cur) {
            const State& s = kv.second.first;
            const mpz_class& mult = kv.second.second;

            // linear part of the mod-2 condition as columns over the epsilon bits
            std::vector<uint64_t> colmask((size_t)W, 0);
            auto cbit = [&](int r, int c, int coord) { return (r * n + c) * 2 + coord; };
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int u = 0; u < 2; ++u) {
                        int t = (i * n + j) * 2 + u;
                        uint64_t m = 0;
                        for (int c = 0; c < n; ++c) {
                            const RamifiedElem& x = s.A1.at(i, c);
                            uint32_t pa = u == 0 ? x.a : 0u, pb = u == 0 ? x.b : x.a;
                            if (pa & 1u) m ^= 1ull << cbit(j, c, 0);
                            if (pb & 1u) m ^= 1ull << cbit(j, c, 1);
                        }
                        for (int r = 0; r < n; ++r) {
                            const RamifiedElem& x = s.A2.at(r, i);
                            uint32_t pa = u == 0 ? x.a : 0u, pb = u == 0 ? x.b : x.a;
                            if (pa & 1u) m ^= 1ull << cbit(r, j, 0);
                            if (pb & 1u) m ^= 1ull << cbit(r, j, 1);
                        }
                        colmask[(size_t)t] = m;
                    }
            F2System sys(W);
            for (int q = 0; q < W; ++q) {
                uint64_t coeffs = 0;
                for (int t = 0; t < W; ++t) coeffs |= ((colmask[(size_t)t] >> q) & 1ull) << t;
                const RamifiedElem& d = s.D.at((q >> 1) / n, (q >> 1) % n);
                sys.add_row(coeffs, (q & 1) == 0 ? (int)(d.a & 1u) : (int)(d.b & 1u));
            }
            F2Solution sol = f2_solve(sys);
            if (!sol.solvable) continue;

            uint64_t nsol = 1ull << sol.nullspace.size();
            if (k == kmax - 1) {
                // no further levels, so the states themselves are not needed
                mpz_class add_n = mult;
                mpz_mul_2exp(add_n.get_mpz_t(), add_n.get_mpz_t(), sol.nullspace.size());
                nk += add_n;
                continue;
            }
            spent += nsol;
            if (spent > kLiftBudgetPerLevel)
                throw capability_error("naive count: lifting state space exceeds the budget");
            for (uint64_t pick = 0; pick < nsol; ++pick) {
                uint64_t bits = sol.particular;
                for (size_t t = 0; t < sol.nullspace.size(); ++t)
                    if ((pick >> t) & 1) bits ^= sol.nullspace[t];
                BMatrix E = decode_f2_matrix(bits, n, K, delta);
                BMatrix Et = conj_transpose(E);
                State ns;
                ns.A1 = add(s.A1, shift2(mul(G.m, E), k));
                ns.A2 = add(s.A2, shift2(mul(Et, G.m), k));
                BMatrix T = add(s.D, add(mul(Et, s.A1), mul(s.A2, E)));
                ns.D = add(halve(T), shift2(mul(Et, mul(G.m, E)), k - 1));
                nk += mult;
                StateKey key = make_key(ns, win);
                auto it = next.find(key);
                if (it == next.end())
                    next.emplace(std::move(key), std::make_pair(std::move(ns), mult));
                else it->second.second += mult;
            }
        }
        // each class mod 2^k has at most 4^(n^2) lifts
        mpz_class cap = counts.back();
        mpz_mul_2exp(cap.get_mpz_t(), cap.get_mpz_t(), (unsigned long)W);
        if (nk > cap) throw verification_error("naive count: lift count exceeds the trivial bound");
        counts.push_back(nk);
        cur = std::move(next);
    }
    return counts;
}

} // namespace

mpz_class count_automorphisms_mod(const HermitianGram& G, int k) {
    return counts_up_to(G, k).back();
}

CountSequence density_estimate(const HermitianGram& G, int kmax) {
    /* The state space of counts_up_to grows with the requested depth, so
     * probe shallow depths first and stop at the first one where the ratio
     * sequence already shows a stable run.  The counts are exact at every
     * depth; deeper runs only append entries. */
    long n2 = (long)G.n * G.n;
    for (int ktop = std::min(kmax, 3);; ktop = std::min(kmax, ktop + 1)) {
        CountSequence cs;
        cs.counts = counts_up_to(G, ktop);
        for (int k = 1; k <= ktop; ++k) {
            mpz_class den = 1;
            mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), (unsigned long)(k * n2));
            mpq_class r(cs.counts[(size_t)k - 1], den);
            r.canonicalize();
            cs.ratios.push_back(r);
        }
        for (size_t i = 0; i + 2 < cs.ratios.size(); ++i)
            if (cs.ratios[i] == cs.ratios[i + 1] && cs.ratios[i] == cs.ratios[i + 2]) {
                cs.stabilized = true;
                cs.stable_level = (int)i + 1;
                cs.density = cs.ratios[i];
                break;
            }
        if (cs.stabilized || ktop == kmax) return cs;
    }
}

namespace {

int q_eval(int kind, int sign, int d, uint32_t v) {
    // kind 0: symplectic (unused), 1: even orthogonal, 2: odd orthogonal
    int q = 0;
    if (kind == 2) {
        q ^= (int)(v & 1u);  // x0^2
        for (int p = 1; p + 1 < d; p += 2) q ^= (int)(((v >> p) & (v >> (p + 1))) & 1u);
        return q;
    }
    int pairs = d / 2 - (sign < 0 ? 1 : 0);
    for (int p = 0; p < 2 * pairs; p += 2) q ^= (int)(((v >> p) & (v >> (p + 1))) & 1u);
    if (sign < 0) {
        uint32_t x = (v >> (d - 2)) & 1u, y = (v >> (d - 1)) & 1u;
        q ^= (int)(x ^ (x & y) ^ y);  // x^2 + xy + y^2
    }
    return q;
}

} // namespace

mpz_class brute_group_order(const ReductiveFactor& g) {
    int d = g.dim;
    if (d == 0) return 1;
    if (g.kind == GroupKind::odd_orthogonal && d == 5) {
        // in residue characteristic 2 the five-dimensional orthogonal group
        // has the same points as Sp(4); enumerating the twin is feasible
        ReductiveFactor twin;
        twin.kind = GroupKind::symplectic;
        twin.dim = 4;
        return brute_group_order(twin);
    }
    if (d > 4) throw capability_error("brute_group_order: dimension too large to enumerate");
    if (g.kind != GroupKind::odd_orthogonal && d % 2 != 0)
        throw std::domain_error("brute_group_order: this kind needs even dimension");

    mpz_class total = 0;
    uint64_t lim = 1ull << (d * d);
    for (uint64_t code = 0; code < lim; ++code) {
        std::vector<uint64_t> rows((size_t)d, 0);
        for (int r = 0; r < d; ++r) rows[(size_t)r] = (code >> (r * d)) & ((1u << d) - 1u);
        if (f2_rank(rows) != d) continue;
        bool ok = true;
        if (g.kind == GroupKind::symplectic) {
            // preserve the alternating form with pairing blocks [[0,1],[1,0]]
            for (int a = 0; a < d && ok; ++a)
                for (int b = a; b < d && ok; ++b) {
                    int want = (a / 2 == b / 2 && a != b) ? 1 : 0;
                    int got = 0;
                    for (int k2 = 0; k2 < d; ++k2) {
                        int ma = (int)((rows[(size_t)k2] >> a) & 1u);
                        if (!ma) continue;
                        int partner = k2 ^ 1;
                        got ^= (int)((rows[(size_t)partner] >> b) & 1u);
                    }
                    if (got != want) ok = false;
                }
        } else {
            int kind = g.kind == GroupKind::odd_orthogonal ? 2 : 1;
            for (uint32_t v = 0; v < (1u << d) && ok; ++v) {
                uint32_t mv = 0;
                for (int r = 0; r < d; ++r) {
                    uint32_t bit = 0;
                    for (int c = 0; c < d; ++c) bit ^= ((rows[(size_t)r] >> c) & 1u) & ((v >> c) & 1u);
                    // rows[r] holds row r of M acting on column vectors: Mv
                    mv |= bit << r;
                }
                if (q_eval(kind, g.sign, d, mv) != q_eval(kind, g.sign, d, v)) ok = false;
            }
        }
        if (ok) ++total;
    }
    return total;
}

} // namespace hermdens
