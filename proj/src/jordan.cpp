#include "hermdens/jordan.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "hermdens/errors.hpp"

namespace hermdens {

std::string tail_kind_name(TailKind t) {
    switch (t) {
        case TailKind::none: return "none";
        case TailKind::unit: return "unit";
        case TailKind::A_1_2b_1: return "A(1,2b,1)";
        case TailKind::A_2delta_2b_1: return "A(2d,2b,1)";
        case TailKind::A_4a_2delta_pi: return "A(4a,2d,pi)";
    }
    return "?";
}

int JordanComponent::tail_rank() const {
    switch (tail) {
        case TailKind::none: return 0;
        case TailKind::unit: return 1;
        default: return 2;
    }
}

BMatrix JordanComponent::gram_block(int K, uint32_t delta) const {
    if (scale < 0)
        throw capability_error("gram_block: negative scale has no integral gram");
    if (rank != 2 * hyperbolic_count + tail_rank())
        throw config_error("gram_block: rank inconsistent with hyperbolic count and tail");
    const bool ev = (scale % 2) == 0;
    if (ev && tail == TailKind::A_4a_2delta_pi)
        throw config_error("gram_block: pi tail on an even scale");
    if (!ev && (tail == TailKind::unit || tail == TailKind::A_1_2b_1 || tail == TailKind::A_2delta_2b_1))
        throw config_error("gram_block: even-scale tail on an odd scale");

    BMatrix g = BMatrix::zeros(rank, rank, K, delta);
    RamifiedElem xi = RamifiedElem::from_int(-2 * (int64_t)delta, K, delta);
    RamifiedElem sc = RamifiedElem::one(K, delta);
    int halves = ev ? scale / 2 : (scale - 1) / 2;
    for (int t = 0; t < halves; ++t) sc = mul(sc, xi);
    auto put = [&](int r, int c, const RamifiedElem& v) { g.set(r, c, mul(sc, v)); };

    const RamifiedElem one = RamifiedElem::one(K, delta);
    const RamifiedElem pi = RamifiedElem::pi(K, delta);
    for (int h = 0; h < hyperbolic_count; ++h) {
        int r = 2 * h;
        if (ev) {
            put(r, r + 1, one);
            put(r + 1, r, one);
        } else {
            put(r, r + 1, pi);
            put(r + 1, r, neg(pi));
        }
    }

    int t0 = 2 * hyperbolic_count;
    auto fi = [&](int64_t v) { return RamifiedElem::from_int(v, K, delta); };
    switch (tail) {
        case TailKind::none:
            break;
        case TailKind::unit:
            if (!(unit_a & 1u)) throw config_error("gram_block: unit tail must be odd");
            put(t0, t0, fi((int64_t)unit_a));
            break;
        case TailKind::A_1_2b_1:
            put(t0, t0, one);
            put(t0, t0 + 1, one);
            put(t0 + 1, t0, one);
            put(t0 + 1, t0 + 1, fi(2 * b_param));
            break;
        case TailKind::A_2delta_2b_1:
            put(t0, t0, fi(2 * (int64_t)delta));
            put(t0, t0 + 1, one);
            put(t0 + 1, t0, one);
            put(t0 + 1, t0 + 1, fi(2 * b_param));
            break;
        case TailKind::A_4a_2delta_pi:
            put(t0, t0, fi(4 * a_param));
            put(t0, t0 + 1, pi);
            put(t0 + 1, t0, neg(pi));
            put(t0 + 1, t0 + 1, fi(2 * (int64_t)delta));
            break;
    }
    return g;
}

uint32_t JordanComponent::bbar() const {
    if (tail == TailKind::A_2delta_2b_1) return (uint32_t)(b_param & 1);
    return 0;
}

int JordanComponent::gammabar() const {
    switch (tail) {
        case TailKind::unit: return (int)(((unit_a - 1) / 2) & 1u);
        case TailKind::A_1_2b_1:
        case TailKind::A_2delta_2b_1: return (int)(b_param & 1);
        case TailKind::A_4a_2delta_pi: return (int)(a_param & 1);
        case TailKind::none: return 0;
    }
    return 0;
}

int JordanDecomposition::total_rank() const {
    int n = 0;
    for (const auto& c : comps) n += c.rank;
    return n;
}

BMatrix assemble_normal_form(const std::vector<JordanComponent>& comps, int K, uint32_t delta) {
    int n = 0;
    for (size_t i = 0; i < comps.size(); ++i) {
        if (i > 0 && comps[i].scale <= comps[i - 1].scale)
            throw config_error("assemble_normal_form: scales must strictly increase");
        n += comps[i].rank;
    }
    BMatrix g = BMatrix::zeros(n, n, K, delta);
    int off = 0;
    for (const auto& c : comps) {
        BMatrix blk = c.gram_block(K, delta);
        for (int r = 0; r < c.rank; ++r)
            for (int s = 0; s < c.rank; ++s) g.set(off + r, off + s, blk.at(r, s));
        off += c.rank;
    }
    return g;
}

namespace {

uint64_t splitmix64(uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

HermitianGram random_isometry_conjugate(const HermitianGram& G, uint64_t seed) {
    int n = G.n;
    int K = G.K();
    uint32_t delta = G.delta();
    uint64_t st = seed ^ 0xa5c152f7d3e9b1ull;
    BMatrix V = BMatrix::identity(n, K, delta);
    uint32_t mask = precision_mask(K);
    if (n > 1) {
        int ops = 8 * n;
        for (int t = 0; t < ops; ++t) {
            int r = (int)(splitmix64(st) % (uint64_t)n);
            int c = (int)(splitmix64(st) % (uint64_t)n);
            if (r == c) continue;
            RamifiedElem x = RamifiedElem::make((uint32_t)splitmix64(st) & mask,
                                                (uint32_t)splitmix64(st) & mask, K, delta);
            // column op: col_c += x * col_r, as a right factor I + x e_{rc}
            BMatrix E = BMatrix::identity(n, K, delta);
            E.set(r, c, x);
            V = mul(V, E);
        }
    }
    // sprinkle unit scalings so diagonals move too
    for (int i = 0; i < n; ++i) {
        uint32_t a = ((uint32_t)splitmix64(st) & mask) | 1u;
        uint32_t b = (uint32_t)splitmix64(st) & mask;
        BMatrix D = BMatrix::identity(n, K, delta);
        D.set(i, i, RamifiedElem::make(a, b, K, delta));
        V = mul(V, D);
    }
    BMatrix H = gram_transform(G.m, V);
    return HermitianGram::from_matrix(H);
}

/* ------------------------------------------------------------------------
   The splitting machinery.

   One invariant carries the whole file: Work.M stays equal to
   sigma^t(Work.U) * G * Work.U digit for digit, because every move is a
   column operation applied simultaneously to U and (congruently) to M with
   exact ring arithmetic.  All reads inside a scale bucket go through the
   divided view (entry / xi^h), which loses nothing: the quotient at
   precision K - h carries exactly the information the full entry had.
   ------------------------------------------------------------------------ */

namespace {

struct Work {
    BMatrix M;
    BMatrix U;
    int K;
    uint32_t delta;
};

RamifiedElem relift(const RamifiedElem& x, int K, uint32_t delta) {
    return RamifiedElem::make(x.a, x.b, K, delta);
}

// v_j += c * v_i
void colop_add(Work& w, int j, int i, const RamifiedElem& c) {
    if (c.is_zero()) return;
    const int n = w.M.rows;
    for (int r = 0; r < n; ++r) w.U.at(r, j) = add(w.U.at(r, j), mul(w.U.at(r, i), c));
    for (int r = 0; r < n; ++r) w.M.at(r, j) = add(w.M.at(r, j), mul(w.M.at(r, i), c));
    const RamifiedElem cs = conj(c);
    for (int s = 0; s < n; ++s) w.M.at(j, s) = add(w.M.at(j, s), mul(cs, w.M.at(i, s)));
}

// v_j *= t
void colop_scale(Work& w, int j, const RamifiedElem& t) {
    const int n = w.M.rows;
    for (int r = 0; r < n; ++r) w.U.at(r, j) = mul(w.U.at(r, j), t);
    for (int r = 0; r < n; ++r) w.M.at(r, j) = mul(w.M.at(r, j), t);
    const RamifiedElem ts = conj(t);
    for (int s = 0; s < n; ++s) w.M.at(j, s) = mul(ts, w.M.at(j, s));
}

void colop_swap(Work& w, int i, int j) {
    if (i == j) return;
    const int n = w.M.rows;
    for (int r = 0; r < n; ++r) std::swap(w.U.at(r, i), w.U.at(r, j));
    for (int r = 0; r < n; ++r) std::swap(w.M.at(r, i), w.M.at(r, j));
    for (int s = 0; s < n; ++s) std::swap(w.M.at(i, s), w.M.at(j, s));
}

RamifiedElem xi_pow(int h, int K, uint32_t delta) {
    RamifiedElem x = RamifiedElem::one(K, delta);
    const RamifiedElem xi = RamifiedElem::from_int(-2 * (int64_t)delta, K, delta);
    for (int i = 0; i < h; ++i) x = mul(x, xi);
    return x;
}

// entry divided by xi^h, seen at precision K - h
RamifiedElem dive(const Work& w, int r, int c, int h) {
    if (h == 0) return w.M.at(r, c);
    return divide_exact(w.M.at(r, c), xi_pow(h, w.K, w.delta));
}

bool eq_upto(const RamifiedElem& x, const RamifiedElem& y, int Kc) {
    return reduce_precision(x, Kc) == reduce_precision(y, Kc);
}

/* Root of A + B*t + C*t^2 over Z/2^Kq via the fixpoint t <- -(A + C t^2)/B.
   Needs v2(A) >= v2(B) and the contraction the callers all satisfy; the
   final check keeps a silent wrong answer impossible. */
uint32_t quad_root(int64_t A64, int64_t B64, int64_t C64, int Kq) {
    const uint32_t mask = precision_mask(Kq);
    const uint32_t A = (uint32_t)A64 & mask;
    const uint32_t B = (uint32_t)B64 & mask;
    const uint32_t C = (uint32_t)C64 & mask;
    if (A == 0) return 0;
    const int e = v2_residue(B, Kq);
    if (e >= Kq || v2_residue(A, Kq) < e)
        throw precision_error("quadratic solve: constant term shallower than the linear one");
    const uint32_t binv = inv_odd(B >> e, Kq);
    uint32_t t = 0;
    for (int it = 0; it < 2 * Kq + 8; ++it) {
        const uint32_t tt = (uint32_t)(((uint64_t)t * t) & mask);
        const uint32_t num = (A + (uint32_t)(((uint64_t)C * tt) & mask)) & mask;
        if (num != 0 && v2_residue(num, Kq) < e)
            throw precision_error("quadratic solve lost divisibility");
        const uint32_t tn = (uint32_t)(0u - (uint32_t)(((uint64_t)(num >> e) * binv) & mask)) & mask;
        if (tn == t) break;
        t = tn;
    }
    const uint32_t bt = (uint32_t)(((uint64_t)B * t) & mask);
    const uint32_t ct2 = (uint32_t)(((uint64_t)C * (((uint64_t)t * t) & mask)) & mask);
    if (((A + bt + ct2) & mask) != 0)
        throw precision_error("quadratic solve did not converge; raise precision_bits");
    return t;
}

/* The divided gram of one scale bucket, with norm and pairing evaluation. */
struct SubGram {
    std::vector<RamifiedElem> T;
    int r = 0;
    int Kd = 0;
    uint32_t delta = 1;

    const RamifiedElem& at(int i, int j) const { return T[(size_t)i * (size_t)r + (size_t)j]; }

    RamifiedElem q(const std::vector<RamifiedElem>& v) const {
        RamifiedElem s = RamifiedElem::zero(Kd, delta);
        for (int i = 0; i < r; ++i) {
            if (v[(size_t)i].is_zero()) continue;
            const RamifiedElem ci = conj(v[(size_t)i]);
            for (int j = 0; j < r; ++j) {
                if (v[(size_t)j].is_zero()) continue;
                s = add(s, mul(mul(ci, at(i, j)), v[(size_t)j]));
            }
        }
        return s;
    }

    // h(w, e_j)
    RamifiedElem pair_row(const std::vector<RamifiedElem>& wv, int j) const {
        RamifiedElem s = RamifiedElem::zero(Kd, delta);
        for (int i = 0; i < r; ++i)
            if (!wv[(size_t)i].is_zero()) s = add(s, mul(conj(wv[(size_t)i]), at(i, j)));
        return s;
    }

    // h(e_j, v)
    RamifiedElem pair_col(int j, const std::vector<RamifiedElem>& v) const {
        RamifiedElem s = RamifiedElem::zero(Kd, delta);
        for (int i = 0; i < r; ++i)
            if (!v[(size_t)i].is_zero()) s = add(s, mul(at(j, i), v[(size_t)i]));
        return s;
    }
};

SubGram subgram(const Work& w, const std::vector<int>& cols, int h) {
    SubGram sg;
    sg.r = (int)cols.size();
    sg.Kd = w.K - h;
    sg.delta = w.delta;
    sg.T.reserve((size_t)sg.r * (size_t)sg.r);
    for (int i = 0; i < sg.r; ++i)
        for (int j = 0; j < sg.r; ++j) sg.T.push_back(dive(w, cols[(size_t)i], cols[(size_t)j], h));
    return sg;
}

/* Newton along one coordinate with an odd pairing.  Norm values are real, so
   everything runs on the a-residue; quadratic convergence lands on an exact
   root of the stored equation. */
bool hensel_refine(const SubGram& sg, std::vector<RamifiedElem>& v, int dir, const RamifiedElem& tgt) {
    const uint32_t mask = precision_mask(sg.Kd);
    for (int it = 0; it < 2 * sg.Kd + 8; ++it) {
        const RamifiedElem f = sub(sg.q(v), tgt);
        if (f.is_zero()) return true;
        if (f.b != 0) return false;
        const RamifiedElem pr = sg.pair_col(dir, v);
        const uint32_t fp = (2u * pr.a) & mask;
        if (fp == 0) return false;
        const int e = v2_residue(fp, sg.Kd);
        if (v2_residue(f.a, sg.Kd) < e) return false;
        const uint32_t stp = (uint32_t)(((uint64_t)(f.a >> e) * inv_odd(fp >> e, sg.Kd)) & mask);
        v[(size_t)dir] = sub(v[(size_t)dir], RamifiedElem::make(stp, 0, sg.Kd, sg.delta));
    }
    return false;
}

struct HypPair {
    bool found = false;
    std::vector<RamifiedElem> wv;  // exact vector with q(w) = target
    int p_local = -1;              // unit coordinate of wv
    std::vector<RamifiedElem> zv;  // dual residue vector (only when asked for)
    int m_local = -1;              // unit coordinate of zv
};

/* Hunts z with h(w, z) a unit and q(z) even, over the columns other than p.
   Both conditions only depend on z mod pi^2, so three residues per slot and
   supports up to size three cover everything a rank bound of two tolerates. */
bool dual_search(const SubGram& sg, const std::vector<RamifiedElem>& wv, int p,
                 std::vector<RamifiedElem>& zv_out, int& m_out) {
    const int r = sg.r;
    std::vector<RamifiedElem> rho((size_t)r);
    for (int j = 0; j < r; ++j) rho[(size_t)j] = sg.pair_row(wv, j);

    std::vector<int> free_cols;
    for (int j = 0; j < r; ++j)
        if (j != p) free_cols.push_back(j);
    const int fr = (int)free_cols.size();
    if (fr == 0) return false;

    std::vector<std::array<int, 3>> sups;
    for (int i = 0; i < fr; ++i) sups.push_back({i, -1, -1});
    for (int i = 0; i < fr; ++i)
        for (int j = i + 1; j < fr; ++j) sups.push_back({i, j, -1});
    for (int i = 0; i < fr; ++i)
        for (int j = i + 1; j < fr; ++j)
            for (int k = j + 1; k < fr; ++k) sups.push_back({i, j, k});

    static constexpr std::array<std::array<uint32_t, 2>, 3> kResidues{{{1u, 0u}, {0u, 1u}, {1u, 1u}}};

    for (const auto& sup : sups) {
        const int sz = (sup[1] < 0) ? 1 : (sup[2] < 0 ? 2 : 3);
        std::array<int, 3> code{0, 0, 0};
        for (;;) {
            std::vector<RamifiedElem> zv((size_t)r, RamifiedElem::zero(sg.Kd, sg.delta));
            bool prim = false;
            for (int s = 0; s < sz; ++s) {
                const auto& res = kResidues[(size_t)code[(size_t)s]];
                if (res[0] & 1u) prim = true;
                zv[(size_t)free_cols[(size_t)sup[(size_t)s]]] =
                    RamifiedElem::make(res[0], res[1], sg.Kd, sg.delta);
            }
            if (prim) {
                RamifiedElem pv = RamifiedElem::zero(sg.Kd, sg.delta);
                for (int j = 0; j < r; ++j)
                    if (!zv[(size_t)j].is_zero()) pv = add(pv, mul(rho[(size_t)j], zv[(size_t)j]));
                if ((pv.a & 1u) && ((sg.q(zv).a & 1u) == 0)) {
                    int m = -1;
                    for (int j = 0; j < r && m < 0; ++j)
                        if (!zv[(size_t)j].is_zero() && (zv[(size_t)j].a & 1u)) m = j;
                    if (m >= 0) {
                        zv_out = std::move(zv);
                        m_out = m;
                        return true;
                    }
                }
            }
            int d = 0;
            while (d < sz && ++code[(size_t)d] == 3) {
                code[(size_t)d] = 0;
                ++d;
            }
            if (d == sz) break;
        }
    }
    return false;
}

/* Enumerates candidate vectors with small support over B/4, screens by the
   norm mod 8, refines the survivors to an exact norm, and (optionally) only
   accepts candidates that also carry a hyperbolic dual. */
HypPair vector_search(const SubGram& sg, int64_t target, bool need_dual) {
    HypPair out;
    const int r = sg.r;
    if (r < 1) return out;
    const RamifiedElem tgt = RamifiedElem::from_int(target, sg.Kd, sg.delta);

    std::vector<std::array<int, 3>> sups;
    for (int i = 0; i < r; ++i) sups.push_back({i, -1, -1});
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) sups.push_back({i, j, -1});
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (int k = j + 1; k < r; ++k) sups.push_back({i, j, k});

    for (const auto& sup : sups) {
        const int sz = (sup[1] < 0) ? 1 : (sup[2] < 0 ? 2 : 3);
        std::array<int, 3> code{1, 1, 1};
        for (;;) {
            std::vector<RamifiedElem> v((size_t)r, RamifiedElem::zero(sg.Kd, sg.delta));
            bool prim = false;
            for (int s = 0; s < sz; ++s) {
                const uint32_t aa = (uint32_t)(code[(size_t)s] & 3);
                const uint32_t bb = (uint32_t)(code[(size_t)s] >> 2);
                if (aa & 1u) prim = true;
                v[(size_t)sup[(size_t)s]] = RamifiedElem::make(aa, bb, sg.Kd, sg.delta);
            }
            if (prim) {
                const RamifiedElem dq = sub(sg.q(v), tgt);
                if ((dq.a & 7u) == 0 && (dq.b & 7u) == 0) {
                    int dir = -1;
                    for (int j = 0; j < r && dir < 0; ++j)
                        if (sg.pair_col(j, v).a & 1u) dir = j;
                    if (dir >= 0) {
                        std::vector<RamifiedElem> wv = v;
                        if (hensel_refine(sg, wv, dir, tgt)) {
                            int p = -1;
                            for (int j = 0; j < r && p < 0; ++j)
                                if (wv[(size_t)j].is_unit()) p = j;
                            if (p >= 0) {
                                if (!need_dual) {
                                    out.found = true;
                                    out.wv = std::move(wv);
                                    out.p_local = p;
                                    return out;
                                }
                                if (dual_search(sg, wv, p, out.zv, out.m_local)) {
                                    out.found = true;
                                    out.wv = std::move(wv);
                                    out.p_local = p;
                                    return out;
                                }
                            }
                        }
                    }
                }
            }
            int d = 0;
            while (d < sz && ++code[(size_t)d] == 16) {
                code[(size_t)d] = 1;
                ++d;
            }
            if (d == sz) break;
        }
    }
    return out;
}

/* Clears the pairings of every other bucket column against the (p, m) plane.
   The plane determinant is a unit at the divided level, so Cramer runs at
   full precision and the cleared entries are exact zeros. */
void orthogonalize_rest(Work& w, const std::vector<int>& cols, int p, int m, int h) {
    const RamifiedElem a = dive(w, p, p, h);
    const RamifiedElem u = dive(w, p, m, h);
    const RamifiedElem uc = dive(w, m, p, h);
    const RamifiedElem b = dive(w, m, m, h);
    const RamifiedElem det = sub(mul(a, b), mul(u, uc));
    if (!det.is_unit()) throw verification_error("hyperbolic plane came out with a non-unit determinant");
    const RamifiedElem di = invert_unit(det);
    for (int x : cols) {
        if (x == p || x == m) continue;
        const RamifiedElem s = dive(w, p, x, h);
        const RamifiedElem t = dive(w, m, x, h);
        if (s.is_zero() && t.is_zero()) continue;
        const RamifiedElem alpha = mul(sub(mul(b, s), mul(u, t)), di);
        const RamifiedElem beta = mul(sub(mul(a, t), mul(uc, s)), di);
        colop_add(w, x, p, relift(neg(alpha), w.K, w.delta));
        colop_add(w, x, m, relift(neg(beta), w.K, w.delta));
    }
}

/* Even-scale bucket: peel hyperbolic planes while a (w, dual) pair exists,
   then canonicalize whatever survives.  Rank 0/1/2 leftovers are the lawful
   tails; anything bigger means the pair search missed something it cannot. */
JordanComponent normalize_even(Work& w, const std::vector<int>& cols, int scale, std::vector<int>& order) {
    const int h = scale / 2;
    const int Kd = w.K - h;
    const uint32_t delta = w.delta;
    const uint32_t maskd = precision_mask(Kd);
    auto dv = [&](int r, int c) { return dive(w, r, c, h); };
    auto lift = [&](const RamifiedElem& x) { return relift(x, w.K, delta); };

    std::vector<int> rem = cols;
    std::vector<std::array<int, 2>> hyps;

    while ((int)rem.size() >= 2) {
        const SubGram sg = subgram(w, rem, h);
        const HypPair hp = vector_search(sg, 0, true);
        if (!hp.found) break;
        const int p = rem[(size_t)hp.p_local];
        const int m = rem[(size_t)hp.m_local];

        colop_scale(w, p, lift(hp.wv[(size_t)hp.p_local]));
        for (int i = 0; i < sg.r; ++i)
            if (i != hp.p_local) colop_add(w, p, rem[(size_t)i], lift(hp.wv[(size_t)i]));

        colop_scale(w, m, lift(hp.zv[(size_t)hp.m_local]));
        for (int i = 0; i < sg.r; ++i)
            if (i != hp.m_local) colop_add(w, m, rem[(size_t)i], lift(hp.zv[(size_t)i]));

        const RamifiedElem pr = dv(p, m);
        if (!pr.is_unit()) throw verification_error("hyperbolic completion lost its unit pairing");
        colop_scale(w, m, lift(invert_unit(pr)));
        orthogonalize_rest(w, rem, p, m, h);

        const RamifiedElem c = dv(m, m);
        if (c.a & 1u) throw verification_error("hyperbolic completion produced an odd corner");
        colop_add(w, m, p, lift(RamifiedElem::make((0u - (c.a >> 1)) & maskd, 0, Kd, delta)));

        hyps.push_back({p, m});
        rem.erase(std::find(rem.begin(), rem.end(), p));
        rem.erase(std::find(rem.begin(), rem.end(), m));
    }

    JordanComponent comp;
    comp.scale = scale;
    comp.hyperbolic_count = (int)hyps.size();
    comp.tail = TailKind::none;
    comp.unit_a = 0;
    comp.b_param = 0;
    comp.a_param = 0;
    std::vector<int> tail_cols;

    if ((int)rem.size() >= 3)
        throw verification_error("even bucket kept rank three after hyperbolic peeling");

    if (rem.size() == 1) {
        const int d = rem[0];
        const RamifiedElem u = dv(d, d);
        if (!u.is_unit()) throw verification_error("even bucket left a non-unit diagonal behind");
        const uint32_t umin = unit_class_rep_mod8(u.a, delta);
        const uint32_t ratio = (uint32_t)(((uint64_t)umin * inv_odd(u.a, Kd)) & maskd);
        colop_scale(w, d, lift(norm_preimage(ratio, Kd, delta)));
        comp.tail = TailKind::unit;
        comp.unit_a = umin;
        tail_cols = {d};
    } else if (rem.size() == 2) {
        const int c0 = rem[0], c1 = rem[1];
        const bool u0 = dv(c0, c0).is_unit();
        const bool u1 = dv(c1, c1).is_unit();
        if (u0 || u1) {
            const int d = u0 ? c0 : c1;
            const int o = u0 ? c1 : c0;
            colop_add(w, o, d, lift(neg(mul(dv(d, o), invert_unit(dv(d, d))))));

            const std::vector<int> pair_cols{d, o};
            const SubGram sg = subgram(w, pair_cols, h);
            const HypPair s = vector_search(sg, 1, false);
            if (!s.found) throw verification_error("unimodular pair admits no norm-one vector");
            const int p = pair_cols[(size_t)s.p_local];
            const int o2 = pair_cols[(size_t)(1 - s.p_local)];
            colop_scale(w, p, lift(s.wv[(size_t)s.p_local]));
            if (!s.wv[(size_t)(1 - s.p_local)].is_zero())
                colop_add(w, p, o2, lift(s.wv[(size_t)(1 - s.p_local)]));

            colop_add(w, o2, p, lift(neg(dv(p, o2))));
            const RamifiedElem uu = dv(o2, o2);
            if (!uu.is_unit()) throw verification_error("norm-one complement is not unimodular");
            const uint32_t umin = unit_class_rep_mod8(uu.a, delta);
            const uint32_t ratio = (uint32_t)(((uint64_t)umin * inv_odd(uu.a, Kd)) & maskd);
            colop_scale(w, o2, lift(norm_preimage(ratio, Kd, delta)));
            colop_add(w, o2, p, lift(RamifiedElem::one(Kd, delta)));
            comp.tail = TailKind::A_1_2b_1;
            comp.b_param = (int64_t)((1 + umin) / 2);
            tail_cols = {p, o2};
        } else {
            const RamifiedElem off0 = dv(c0, c1);
            if (!off0.is_unit()) throw verification_error("leftover plane is neither unimodular nor split");
            colop_scale(w, c1, lift(invert_unit(off0)));
            const uint32_t ah = dv(c0, c0).a;
            const uint32_t bh = dv(c1, c1).a;
            if ((ah & 1u) || (bh & 1u) || !((ah >> 1) & 1u) || !((bh >> 1) & 1u))
                throw verification_error("leftover plane has unexpected diagonal classes");
            const uint32_t cshift = quad_root((int64_t)(ah >> 1) - (int64_t)delta, 1, (int64_t)(bh >> 1), Kd);
            colop_add(w, c0, c1, lift(RamifiedElem::make(cshift, 0, Kd, delta)));
            const RamifiedElem one_d = RamifiedElem::one(Kd, delta);
            const RamifiedElem two_d = RamifiedElem::from_int(2, Kd, delta);
            for (int round = 0;; ++round) {
                if (round > 64) throw precision_error("nonsplit plane polish stalled; raise precision_bits");
                const RamifiedElem off = dv(c0, c1);
                if (!eq_upto(off, one_d, Kd - 1)) {
                    colop_scale(w, c1, lift(invert_unit(off)));
                    continue;
                }
                const RamifiedElem q2 = dv(c1, c1);
                if (eq_upto(q2, two_d, Kd - 1)) break;
                const uint32_t x = quad_root((int64_t)(q2.a >> 1) - 1, 1, (int64_t)delta, Kd);
                colop_add(w, c1, c0, lift(RamifiedElem::make(x, 0, Kd, delta)));
            }
            comp.tail = TailKind::A_2delta_2b_1;
            comp.b_param = 1;
            tail_cols = {c0, c1};
        }
    }

    comp.rank = 2 * comp.hyperbolic_count + (int)tail_cols.size();
    for (const auto& pr2 : hyps) {
        order.push_back(pr2[0]);
        order.push_back(pr2[1]);
    }
    for (int t : tail_cols) order.push_back(t);
    return comp;
}

/* One odd-scale 2x2 block.  Returns true when it lands on the hyperbolic
   plane, false when it carries the anisotropic tail (a_out gets the 0/1
   parameter).  All reads happen through the divided view; divisions by pi
   cost one digit, which the final tolerance absorbs. */
bool odd_block_normalize(Work& w, int p, int m, int h, int64_t& a_out) {
    const int Kd = w.K - h;
    const int Ko = Kd - 1;
    const uint32_t delta = w.delta;
    const uint32_t maskd = precision_mask(Kd);
    auto dv = [&](int r, int c) { return dive(w, r, c, h); };
    auto lift = [&](const RamifiedElem& x) { return relift(x, w.K, delta); };
    const RamifiedElem pi_d = RamifiedElem::pi(Kd, delta);

    uint32_t a2 = 0, b2 = 0;
    for (int guard = 0;; ++guard) {
        if (guard > 8) throw verification_error("odd block positioning failed to settle");
        const RamifiedElem off = dv(p, m);
        if (pi_valuation(off) != 1) throw verification_error("odd block lost its unimodular pairing");
        colop_scale(w, m, lift(divide_exact(pi_d, off)));
        a2 = dv(p, p).a;
        b2 = dv(m, m).a;
        if ((a2 & 1u) || (b2 & 1u)) throw verification_error("odd block diagonal holds a unit norm");
        const bool ah_odd = ((a2 >> 1) & 1u) != 0;
        const bool bh_odd = ((b2 >> 1) & 1u) != 0;
        if (!ah_odd) break;
        if (bh_odd) {
            colop_add(w, m, p, RamifiedElem::one(w.K, delta));
            continue;
        }
        colop_swap(w, p, m);
    }

    if (((b2 >> 1) & 1u) == 0) {
        // both halves even: the plane is hyperbolic
        const uint32_t a_ = (a2 >> 1) & maskd;
        const uint32_t b_ = (b2 >> 1) & maskd;
        const uint32_t t1 = quad_root((int64_t)a_, 2 * (int64_t)delta, -2 * (int64_t)delta * (int64_t)b_, Kd);
        if (t1) colop_add(w, p, m, RamifiedElem::make(0, t1, w.K, delta));
        colop_scale(w, m, lift(invert_unit(divide_exact(dv(p, m), pi_d))));
        const uint32_t q2 = dv(m, m).a;
        if (q2 & 3u) throw verification_error("hyperbolic odd corner not divisible by four");
        const uint32_t s1 = (uint32_t)((((uint64_t)(q2 >> 2)) * inv_odd(delta, Kd)) & maskd);
        if (s1) colop_add(w, m, p, RamifiedElem::make(0, s1, w.K, delta));
        return true;
    }

    // anisotropic tail: walk the corner into a norm class, pin it at
    // 2*delta, then shape the other diagonal to 4a with a in {0, 1}
    const uint32_t a_ = (a2 >> 1) & maskd;
    const uint32_t b_ = (b2 >> 1) & maskd;
    const uint32_t want1 = delta & 7u;
    const uint32_t want2 = (uint32_t)(((int64_t)delta * (((int64_t)1 - 2 * (int64_t)delta) & 7)) & 7);
    uint32_t c1pick = 4;
    for (uint32_t c1 = 0; c1 < 4 && c1pick > 3; ++c1) {
        const int64_t shifted = ((int64_t)b_ - 2 * (int64_t)delta * (int64_t)c1 * (1 + (int64_t)a_ * (int64_t)c1)) & 7;
        if ((uint32_t)shifted == want1 || (uint32_t)shifted == want2) c1pick = c1;
    }
    if (c1pick > 3) throw verification_error("odd tail corner has no reachable norm class");
    if (c1pick) {
        colop_add(w, m, p, RamifiedElem::make(0, c1pick, w.K, delta));
        colop_scale(w, m, lift(invert_unit(divide_exact(dv(p, m), pi_d))));
    }

    {
        const uint32_t bcur = (dv(m, m).a >> 1) & maskd;
        const uint32_t ratio = (uint32_t)(((uint64_t)delta * inv_odd(bcur, Kd)) & maskd);
        colop_scale(w, m, lift(norm_preimage(ratio, Kd, delta)));
    }
    {
        const RamifiedElem uo = divide_exact(dv(p, m), pi_d);
        colop_scale(w, p, lift(conj(invert_unit(uo))));
    }

    const uint32_t q1 = dv(p, p).a;
    if (q1 & 3u) throw verification_error("odd tail norm not divisible by four");
    const uint32_t app = (q1 >> 2) & maskd;
    const uint32_t astar = app & 1u;
    if (((app - astar) & maskd) != 0) {
        const uint32_t g = (app - astar) & maskd;
        const uint32_t s1 = quad_root((int64_t)g, (int64_t)delta, -(int64_t)delta * (int64_t)delta, Kd);
        if (s1) colop_add(w, p, m, RamifiedElem::make(0, s1, w.K, delta));
    }

    const RamifiedElem two_delta = RamifiedElem::from_int(2 * (int64_t)delta, Kd, delta);
    for (int round = 0;; ++round) {
        if (round > 64) throw precision_error("odd tail polish stalled; raise precision_bits");
        const RamifiedElem off = dv(p, m);
        const bool off_ok = eq_upto(off, pi_d, Ko);
        if (!off_ok) colop_scale(w, m, lift(invert_unit(divide_exact(off, pi_d))));
        const RamifiedElem q2e = dv(m, m);
        const bool cor_ok = eq_upto(q2e, two_delta, Ko);
        if (!cor_ok) {
            const uint32_t c2 = (q2e.a >> 1) & maskd;
            const uint32_t lam = quad_root((int64_t)c2 - (int64_t)delta, -2 * (int64_t)delta,
                                           -4 * (int64_t)delta * (int64_t)astar, Kd);
            if (lam) colop_add(w, m, p, RamifiedElem::make(0, lam, w.K, delta));
        }
        if (off_ok && cor_ok) break;
    }

    a_out = (int64_t)astar;
    return false;
}

/* Two anisotropic tails merge into one hyperbolic plane plus a fresh
   unimodular-pairing block that gets renormalized by the caller. */
void odd_pair_reduce(Work& w, const std::array<int, 2>& t1, const std::array<int, 2>& t2,
                     int h, int64_t a1) {
    const int Kd = w.K - h;
    const uint32_t delta = w.delta;
    const RamifiedElem pi_d = RamifiedElem::pi(Kd, delta);
    const int p1 = t1[0], m1 = t1[1];
    const int p2 = t2[0], m2 = t2[1];

    if (a1 == 1) colop_add(w, p1, m2, RamifiedElem::make(0, inv_odd(delta, w.K), w.K, delta));
    colop_add(w, m1, m2, RamifiedElem::one(w.K, delta));
    const int64_t lam = (a1 == 1) ? -1 : 1;
    colop_add(w, m1, p1, mul(RamifiedElem::pi(w.K, delta), RamifiedElem::from_int(lam, w.K, delta)));
    if (a1 == 1) colop_scale(w, m1, RamifiedElem::from_int(-1, w.K, delta));

    for (int x : {p2, m2}) {
        const RamifiedElem hp = dive(w, p1, x, h);
        const RamifiedElem hm = dive(w, m1, x, h);
        const RamifiedElem beta = divide_exact(hp, pi_d);
        const RamifiedElem alpha = neg(divide_exact(hm, pi_d));
        colop_add(w, x, p1, relift(neg(alpha), w.K, delta));
        colop_add(w, x, m1, relift(neg(beta), w.K, delta));
    }
}

JordanComponent normalize_odd(Work& w, const std::vector<std::array<int, 2>>& blocks,
                              int scale, std::vector<int>& order) {
    const int h = (scale - 1) / 2;
    std::vector<std::array<int, 2>> hyps;
    std::vector<std::pair<std::array<int, 2>, int64_t>> tails;
    for (const auto& blk : blocks) {
        int64_t a = 0;
        if (odd_block_normalize(w, blk[0], blk[1], h, a)) hyps.push_back(blk);
        else tails.emplace_back(blk, a);
    }
    while (tails.size() >= 2) {
        const auto first = tails[0];
        const auto second = tails[1];
        odd_pair_reduce(w, first.first, second.first, h, first.second);
        tails.erase(tails.begin(), tails.begin() + 2);
        hyps.push_back(first.first);
        int64_t a = 0;
        if (odd_block_normalize(w, second.first[0], second.first[1], h, a)) hyps.push_back(second.first);
        else tails.emplace_back(second.first, a);
    }

    JordanComponent comp;
    comp.scale = scale;
    comp.hyperbolic_count = (int)hyps.size();
    comp.tail = tails.empty() ? TailKind::none : TailKind::A_4a_2delta_pi;
    comp.unit_a = 0;
    comp.b_param = 0;
    comp.a_param = tails.empty() ? 0 : tails[0].second;
    comp.rank = 2 * (int)hyps.size() + (tails.empty() ? 0 : 2);
    for (const auto& pr : hyps) {
        order.push_back(pr[0]);
        order.push_back(pr[1]);
    }
    if (!tails.empty()) {
        order.push_back(tails[0].first[0]);
        order.push_back(tails[0].first[1]);
    }
    return comp;
}

}  // namespace

JordanDecomposition jordan_split(const HermitianGram& G) {
    GramDiagnostics diag = validate_gram(G);
    if (!diag.ok) {
        std::string msg = "jordan_split: gram rejected";
        for (const auto& s : diag.issues) {
            msg += "; ";
            msg += s;
        }
        throw config_error(msg);
    }

    const int n = G.n;
    const int K = G.K();
    const uint32_t delta = G.delta();

    JordanDecomposition dec;
    dec.delta = delta;
    dec.K = K;
    if (n == 0) {
        dec.U = BMatrix::identity(0, K, delta);
        dec.normal_form = BMatrix::zeros(0, 0, K, delta);
        return dec;
    }

    Work w{G.m, BMatrix::identity(n, K, delta), K, delta};

    // split the gram into mutually orthogonal blocks, deepest scales last
    struct Blk {
        int scale;
        std::array<int, 2> cols;
        int size;
    };
    std::vector<Blk> blks;
    std::vector<int> rem((size_t)n);
    std::iota(rem.begin(), rem.end(), 0);

    while (!rem.empty()) {
        int mu = kValInfinite;
        for (int r : rem)
            for (int c : rem) mu = std::min(mu, pi_valuation(w.M.at(r, c)));
        if (mu >= 2 * K - kValGuard)
            throw precision_error("jordan_split: remaining pairings vanish at this precision; raise precision_bits");

        int dpos = -1;
        for (int d : rem)
            if (pi_valuation(w.M.at(d, d)) == mu) {
                dpos = d;
                break;
            }

        if (dpos >= 0) {
            const RamifiedElem piv = w.M.at(dpos, dpos);
            for (int j : rem) {
                if (j == dpos) continue;
                const RamifiedElem x = w.M.at(dpos, j);
                if (x.is_zero()) continue;
                colop_add(w, j, dpos, relift(neg(divide_exact(x, piv)), K, delta));
            }
            blks.push_back({mu, {dpos, -1}, 1});
            rem.erase(std::find(rem.begin(), rem.end(), dpos));
        } else {
            if (mu > K - 4)
                throw precision_error("jordan_split: block scale too close to the precision ceiling; raise precision_bits");
            int br = -1, bc = -1;
            for (size_t i = 0; i < rem.size() && br < 0; ++i)
                for (size_t j = i + 1; j < rem.size(); ++j)
                    if (pi_valuation(w.M.at(rem[i], rem[j])) == mu) {
                        br = rem[i];
                        bc = rem[j];
                        break;
                    }
            if (br < 0) throw verification_error("jordan_split: minimal valuation vanished from the scan");

            const RamifiedElem det2 =
                sub(mul(w.M.at(br, br), w.M.at(bc, bc)), mul(w.M.at(br, bc), w.M.at(bc, br)));
            std::vector<int> others;
            std::vector<std::array<RamifiedElem, 2>> coeff;
            for (int j : rem) {
                if (j == br || j == bc) continue;
                const RamifiedElem s = w.M.at(br, j);
                const RamifiedElem t = w.M.at(bc, j);
                const RamifiedElem n1 = sub(mul(w.M.at(bc, bc), s), mul(w.M.at(br, bc), t));
                const RamifiedElem n2 = sub(mul(w.M.at(br, br), t), mul(w.M.at(bc, br), s));
                RamifiedElem ca = n1.is_zero() ? n1 : neg(divide_exact(n1, det2));
                RamifiedElem cb = n2.is_zero() ? n2 : neg(divide_exact(n2, det2));
                others.push_back(j);
                coeff.push_back({ca, cb});
            }
            for (size_t idx = 0; idx < others.size(); ++idx) {
                if (!coeff[idx][0].is_zero()) colop_add(w, others[idx], br, relift(coeff[idx][0], K, delta));
                if (!coeff[idx][1].is_zero()) colop_add(w, others[idx], bc, relift(coeff[idx][1], K, delta));
            }
            blks.push_back({mu, {br, bc}, 2});
            rem.erase(std::find(rem.begin(), rem.end(), br));
            rem.erase(std::find(rem.begin(), rem.end(), bc));
        }
    }

    std::map<int, std::vector<Blk>> buckets;
    int maxscale = 0;
    for (const auto& b : blks) {
        if ((b.scale & 1) && b.size == 1)
            throw verification_error("jordan_split: odd-scale rank-one block cannot exist");
        buckets[b.scale].push_back(b);
        maxscale = std::max(maxscale, b.scale);
    }
    if (K - maxscale / 2 < 8)
        throw precision_error("jordan_split: precision too small for the deepest scale; raise precision_bits");

    std::vector<JordanComponent> comps;
    std::vector<int> order;
    for (auto& [scale, list] : buckets) {
        std::vector<int> part;
        JordanComponent c;
        if (scale % 2 == 0) {
            std::vector<int> cols;
            for (const auto& b : list) {
                cols.push_back(b.cols[0]);
                if (b.size == 2) cols.push_back(b.cols[1]);
            }
            c = normalize_even(w, cols, scale, part);
        } else {
            std::vector<std::array<int, 2>> bl;
            for (const auto& b : list) bl.push_back(b.cols);
            c = normalize_odd(w, bl, scale, part);
        }
        comps.push_back(c);
        order.insert(order.end(), part.begin(), part.end());
    }

    if ((int)order.size() != n) throw verification_error("jordan_split: column accounting is off");

    BMatrix Up = BMatrix::zeros(n, n, K, delta);
    for (int k = 0; k < n; ++k)
        for (int r = 0; r < n; ++r) Up.at(r, k) = w.U.at(r, order[(size_t)k]);

    const int KW = K - std::max(4, maxscale / 2 + 2);
    BMatrix NF = assemble_normal_form(comps, K, delta);
    const BMatrix R = gram_transform(G.m, Up);
    if (!(reduce_precision(R, KW) == reduce_precision(NF, KW)))
        throw verification_error("jordan_split: transformed gram disagrees with the normal form");

    dec.comps = std::move(comps);
    dec.U = std::move(Up);
    dec.normal_form = std::move(NF);
    dec.K = KW;
    return dec;
}

} // namespace hermdens
