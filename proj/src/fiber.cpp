#include "hermdens/fiber.hpp"

#include <algorithm>
#include <cassert>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hermdens/classify.hpp"
#include "hermdens/errors.hpp"

namespace hermdens {

namespace {

/* The special fiber is enumerated through its matrix model.  A point is a
 * tuple of coordinates over kappa[pi]/(pi^2): one per matrix slot, plus the
 * starred coordinates carried by type I components (z* on even scales,
 * m* and m** on bound odd scales).  Every coordinate is lifted to the
 * ramified order with digits in {0,1}, the linear starred relations are
 * solved exactly inside the lift, and membership is decided by comparing
 * sigma^t(m) h m against h slot by slot at the depth the hermitian shape
 * fixes for that slot.  Working with exact lifts means the starred
 * coordinates of products and transforms come out of plain matrix
 * arithmetic, so no symbolic rewriting is needed anywhere. */

enum class SlotRole { plain, pi_times, one_plus_pi };

struct Block {
    int scale = 0;
    int rank = 0;
    int off = 0;
    TypeTag tag = TypeTag::II_even;
    bool bound = false;

    bool even_type_I() const {
        return tag == TypeTag::I_odd_rank || tag == TypeTag::I_even_rank;
    }
    bool free_odd_type_I() const { return tag == TypeTag::I_odd_scale && !bound; }
    bool bound_odd_type_I() const { return tag == TypeTag::I_odd_scale && bound; }
    bool even_scale() const { return (scale & 1) == 0; }
};

/* Row of an even type I block holding its norm vector: the last row when the
 * rank is odd, the one above the corner when the rank is even.  The starred
 * relations of an adjacent odd scale read this row. */
int norm_row(const Block& b) {
    return b.tag == TypeTag::I_even_rank ? b.rank - 2 : b.rank - 1;
}

/* Slot of the z coordinate resolved by z* inside an even type I block. */
std::pair<int, int> z_slot(const Block& b) {
    if (b.tag == TypeTag::I_odd_rank) return {b.rank - 1, b.rank - 1};
    return {b.rank - 2, b.rank - 1};
}

// 0: bulk rows/cols, 1: second-to-last, 2: last
int part3(int x, int m) { return x < m - 2 ? 0 : (x == m - 2 ? 1 : 2); }

/* How a local coordinate sits in the assembled matrix entry of a diagonal
 * block: bare, multiplied by pi, or offset against 1 + pi * coordinate. */
SlotRole diag_role(const Block& b, int r, int c) {
    const int m = b.rank;
    if (b.even_scale()) {
        if (b.tag == TypeTag::I_odd_rank) {
            const bool er = r == m - 1, ec = c == m - 1;
            if (er && ec) return SlotRole::one_plus_pi;
            if (er || ec) return SlotRole::pi_times;
            return SlotRole::plain;
        }
        if (b.tag == TypeTag::I_even_rank) {
            const int pr = part3(r, m), pc = part3(c, m);
            if ((pr == 1 && pc == 1) || (pr == 2 && pc == 2)) return SlotRole::one_plus_pi;
            if (pr == 0 && pc == 2) return SlotRole::pi_times;
            if (pr == 1) return SlotRole::pi_times;
            return SlotRole::plain;
        }
        return SlotRole::plain;
    }
    if (b.free_odd_type_I()) {
        const int pr = part3(r, m), pc = part3(c, m);
        if ((pr == 1 && pc == 1) || (pr == 2 && pc == 2)) return SlotRole::one_plus_pi;
        if (pr == 0 && pc == 1) return SlotRole::pi_times;
        if (pr == 2 && pc != 2) return SlotRole::pi_times;
        return SlotRole::plain;
    }
    return SlotRole::plain;
}

/* Minimum pi-adic valuation required of sigma^t(m) h m - h at a slot.  Off
 * the block diagonal every normalized coordinate lives in B tensor kappa,
 * so two levels past the larger scale; on a diagonal block the depth tracks
 * which coordinate of the hermitian shape the slot carries. */
int slot_threshold(const Block& brow, const Block& bcol, int r, int c, bool same_block) {
    if (!same_block) return std::max(brow.scale, bcol.scale) + 2;
    const Block& b = brow;
    const int i = b.scale, m = b.rank;
    if (b.even_scale()) {
        if (b.tag == TypeTag::II_even) return r == c ? i + 4 : i + 2;
        if (b.tag == TypeTag::I_odd_rank) {
            const bool er = r == m - 1, ec = c == m - 1;
            if (er && ec) return i + 6;
            if (er || ec) return i + 3;
            return r == c ? i + 4 : i + 2;
        }
        const int pr = part3(r, m), pc = part3(c, m);
        if (pr == 0 && pc == 0) return r == c ? i + 4 : i + 2;
        if (pr + pc == 1) return i + 2;
        if (pr == 0 || pc == 0) return i + 3;
        if (pr == 1 && pc == 1) return i + 4;
        if (pr + pc == 3) return i + 3;
        return i + 6;
    }
    if (!b.free_odd_type_I()) return r == c ? i + 5 : i + 2;
    const int pr = part3(r, m), pc = part3(c, m);
    if (pr == 0 && pc == 0) return r == c ? i + 5 : i + 2;
    if (pr + pc == 1) return i + 3;
    if (pr == 0 || pc == 0) return i + 2;
    if (pr == 1 && pc == 1) return i + 5;
    if (pr + pc == 3) return i + 3;
    return i + 5;
}

/* One free coordinate of the model, worth two bits of the candidate code.
 * Either a slot of the coordinate matrix or an entry of a starred vector. */
struct FreeCoord {
    enum Kind { slot, z_star, m_star, m_star_star };
    Kind kind = slot;
    int bi = 0, bj = 0;  // block pair for slots, owning block otherwise
    int r = 0, c = 0;    // local position, or entry index in c / r
};

struct Deps {
    // neighbour blocks whose designated row / last column the starred
    // relations of an odd bound type I block determine, and the free mate
    int row_dep = -1, row_other = -1;
    int col_dep = -1, col_other = -1;
};

struct Layout {
    int n = 0;
    int KF = kDefaultPrecision;
    uint32_t delta = 1;
    TypeProfile prof;
    std::vector<Block> blocks;
    std::vector<Deps> deps;
    BMatrix h;
    std::vector<FreeCoord> frees;
    std::vector<RamifiedElem> pipow;
};

int find_block(const Layout& L, int scale) {
    for (size_t t = 0; t < L.blocks.size(); ++t)
        if (L.blocks[t].scale == scale) return (int)t;
    return -1;
}

/* Index of the first component that is bound of type I on an odd scale yet
 * keeps an anisotropic plane; -1 when every such component is hyperbolic. */
int first_tailed_bound(const JordanDecomposition& d, const TypeProfile& prof) {
    for (size_t t = 0; t < prof.scales.size() && t < d.comps.size(); ++t) {
        const ScaleType& st = prof.scales[t];
        if ((st.scale & 1) && st.tag == TypeTag::I_odd_scale && st.bound &&
            d.comps[t].tail != TailKind::none)
            return (int)t;
    }
    return -1;
}

int tailed_bound_count(const JordanDecomposition& d, const TypeProfile& prof) {
    int cnt = 0;
    for (size_t t = 0; t < prof.scales.size() && t < d.comps.size(); ++t) {
        const ScaleType& st = prof.scales[t];
        if ((st.scale & 1) && st.tag == TypeTag::I_odd_scale && st.bound &&
            d.comps[t].tail != TailKind::none)
            ++cnt;
    }
    return cnt;
}

/* A Jordan splitting may keep an anisotropic plane on a bound odd type I
 * scale.  The lattice it describes also admits splittings where that scale
 * is purely hyperbolic, and only those have the shape the coordinate
 * templates cover.  Mixing the norm vector of an even type I neighbour into
 * the leading tail vector is a unimodular change of basis that leaves the
 * lattice alone but moves the splitting; re-splitting the transformed gram
 * then lands in the hyperbolic shape for one of a handful of unit
 * multipliers.  Each accepted step removes one anisotropic plane, so the
 * loop terminates. */
JordanDecomposition hyperbolize_bound_scales(const JordanDecomposition& dec) {
    JordanDecomposition cur = dec;
    const int rounds = (int)dec.comps.size() + 1;
    for (int round = 0; round < rounds; ++round) {
        const TypeProfile prof = classify(cur);
        const int bad = first_tailed_bound(cur, prof);
        if (bad < 0) return cur;

        std::vector<int> offs(cur.comps.size());
        int off = 0;
        for (size_t q = 0; q < cur.comps.size(); ++q) {
            offs[q] = off;
            off += cur.comps[q].rank;
        }
        const int n = off;
        const int tail_off = offs[bad] + 2 * cur.comps[bad].hyperbolic_count;
        const BMatrix nf = assemble_normal_form(cur.comps, cur.K, cur.delta);
        const std::vector<std::tuple<uint32_t, uint32_t, bool>> mixers = {
            {1, 0, false}, {3, 0, false}, {1, 1, false}, {3, 1, false},
            {0, 1, false}, {0, 3, false},
            {1, 0, true},  {3, 0, true},  {1, 1, true},  {3, 1, true},
            {0, 1, true},  {0, 3, true}};

        bool advanced = false;
        for (int tgt : {tail_off + 1, tail_off}) {
            if (advanced) break;
            for (int side : {-1, +1}) {
                if (advanced) break;
                int u = -1;
                for (size_t q = 0; q < cur.comps.size(); ++q)
                    if (cur.comps[q].scale == cur.comps[bad].scale + side) u = (int)q;
                if (u < 0) continue;
                const ScaleType& stu = prof.scales[u];
                if (stu.tag != TypeTag::I_odd_rank && stu.tag != TypeTag::I_even_rank) continue;
                const int g_idx = offs[u] + (stu.tag == TypeTag::I_even_rank
                                                 ? cur.comps[u].rank - 2
                                                 : cur.comps[u].rank - 1);
                for (const auto& [ca, cb, flip] : mixers) {
                    // perturb whichever vector sits at the lower scale: either
                    // the neighbour's norm vector gains a tail vector, or a
                    // tail vector gains the norm vector. The re-split then
                    // builds a different complement at the bound scale instead
                    // of undoing the change during orthogonalization.
                    BMatrix U = BMatrix::identity(n, cur.K, cur.delta);
                    if (flip)
                        U.set(g_idx, tgt, RamifiedElem::make(ca, cb, cur.K, cur.delta));
                    else
                        U.set(tgt, g_idx, RamifiedElem::make(ca, cb, cur.K, cur.delta));
                    JordanDecomposition next =
                        jordan_split(HermitianGram::from_matrix(gram_transform(nf, U)));
                    const TypeProfile nprof = classify(next);
                    if (nprof.scales.size() != prof.scales.size()) continue;
                    bool same_profile = true;
                    for (size_t q = 0; q < prof.scales.size(); ++q)
                        if (nprof.scales[q].scale != prof.scales[q].scale ||
                            nprof.scales[q].rank != prof.scales[q].rank ||
                            nprof.scales[q].tag != prof.scales[q].tag ||
                            nprof.scales[q].bound != prof.scales[q].bound)
                            same_profile = false;
                    if (!same_profile) continue;
                    if (next.comps[bad].tail != TailKind::none) continue;
                    if (tailed_bound_count(next, nprof) >= tailed_bound_count(cur, prof))
                        continue;
                    cur = std::move(next);
                    advanced = true;
                    break;
                }
            }
        }
        if (!advanced)
            throw verification_error(
                "fiber model: no basis mixing renormalizes the bound type I component"
                " at scale " + std::to_string(cur.comps[bad].scale));
    }
    throw verification_error("fiber model: bound scale renormalization did not settle");
}

Layout build_layout(const JordanDecomposition& dec) {
    Layout L;
    L.prof = classify(dec);
    L.delta = dec.delta;
    L.n = L.prof.n;

    int maxscale = 0;
    for (const auto& st : L.prof.scales) maxscale = std::max(maxscale, st.scale);
    L.KF = std::max(kDefaultPrecision, maxscale + 10);

    if (L.prof.scales.size() != dec.comps.size())
        throw config_error("fiber model: decomposition carries empty components");

    int off = 0;
    for (const auto& st : L.prof.scales) {
        Block b;
        b.scale = st.scale;
        b.rank = st.rank;
        b.off = off;
        b.tag = st.tag;
        b.bound = st.bound;
        off += st.rank;
        L.blocks.push_back(b);
    }

    /* The model parametrizes the normal form of Jordan splittings whose
     * bound odd type I components are purely hyperbolic.  A splitting that
     * keeps an anisotropic plane on such a scale describes the same lattice
     * but sits outside the shape the templates cover. */
    for (size_t t = 0; t < L.blocks.size(); ++t) {
        if (L.blocks[t].bound_odd_type_I() && dec.comps[t].tail != TailKind::none)
            throw capability_error(
                "fiber model: the component at scale " + std::to_string(L.blocks[t].scale) +
                " is bound of type I but keeps an anisotropic tail; only its"
                " all-hyperbolic shape is supported");
    }

    L.deps.assign(L.blocks.size(), Deps{});
    for (size_t t = 0; t < L.blocks.size(); ++t) {
        const Block& b = L.blocks[t];
        if (!b.bound_odd_type_I()) continue;
        const int lo = find_block(L, b.scale - 1);
        const int hi = find_block(L, b.scale + 1);
        const bool lo_I = lo >= 0 && L.blocks[lo].even_type_I();
        const bool hi_I = hi >= 0 && L.blocks[hi].even_type_I();
        Deps d;
        d.row_dep = hi_I ? hi : lo;
        d.row_other = (hi_I && lo_I) ? lo : -1;
        d.col_dep = d.row_dep;
        d.col_other = d.row_other;
        L.deps[t] = d;
    }

    L.h = assemble_normal_form(dec.comps, L.KF, L.delta);

    for (size_t ti = 0; ti < L.blocks.size(); ++ti)
        for (size_t tj = 0; tj < L.blocks.size(); ++tj) {
            const Block& bi = L.blocks[ti];
            const Block& bj = L.blocks[tj];
            for (int r = 0; r < bi.rank; ++r)
                for (int c = 0; c < bj.rank; ++c) {
                    if (ti == tj && bi.even_type_I() &&
                        std::make_pair(r, c) == z_slot(bi))
                        continue;
                    if (ti != tj && bj.bound_odd_type_I() &&
                        (int)ti == L.deps[tj].row_dep && r == norm_row(bi))
                        continue;
                    if (ti != tj && bi.bound_odd_type_I() &&
                        (int)tj == L.deps[ti].col_dep && c == bj.rank - 1)
                        continue;
                    L.frees.push_back({FreeCoord::slot, (int)ti, (int)tj, r, c});
                }
        }
    for (size_t t = 0; t < L.blocks.size(); ++t) {
        const Block& b = L.blocks[t];
        if (b.even_type_I())
            L.frees.push_back({FreeCoord::z_star, (int)t, (int)t, 0, 0});
        if (b.bound_odd_type_I()) {
            for (int c = 0; c < b.rank; ++c)
                L.frees.push_back({FreeCoord::m_star, (int)t, (int)t, 0, c});
            for (int r = 0; r < b.rank; ++r)
                L.frees.push_back({FreeCoord::m_star_star, (int)t, (int)t, r, 0});
        }
    }
    assert((long)L.frees.size() == (long)L.n * L.n);

    const int maxpow = maxscale + 2;
    RamifiedElem p = RamifiedElem::one(L.KF, L.delta);
    for (int k = 0; k <= maxpow; ++k) {
        L.pipow.push_back(p);
        p = mul(p, RamifiedElem::pi(L.KF, L.delta));
    }
    return L;
}

/* Candidate coordinates: the lifted coordinate matrix plus the starred
 * vectors, all over the ramified order at KF digits. */
struct Coords {
    BMatrix C;
    std::vector<std::vector<RamifiedElem>> zs, ms, mss;
};

Coords blank_coords(const Layout& L) {
    Coords X;
    X.C = BMatrix::zeros(L.n, L.n, L.KF, L.delta);
    X.zs.resize(L.blocks.size());
    X.ms.resize(L.blocks.size());
    X.mss.resize(L.blocks.size());
    for (size_t t = 0; t < L.blocks.size(); ++t) {
        const Block& b = L.blocks[t];
        if (b.even_type_I())
            X.zs[t].assign(1, RamifiedElem::zero(L.KF, L.delta));
        if (b.bound_odd_type_I()) {
            X.ms[t].assign(b.rank, RamifiedElem::zero(L.KF, L.delta));
            X.mss[t].assign(b.rank, RamifiedElem::zero(L.KF, L.delta));
        }
    }
    return X;
}

Coords decode(const Layout& L, uint64_t code) {
    Coords X = blank_coords(L);
    for (size_t q = 0; q < L.frees.size(); ++q) {
        const FreeCoord& f = L.frees[q];
        const uint32_t lo = (uint32_t)((code >> (2 * q)) & 1u);
        const uint32_t hi = (uint32_t)((code >> (2 * q + 1)) & 1u);
        const RamifiedElem v = RamifiedElem::make(lo, hi, L.KF, L.delta);
        switch (f.kind) {
        case FreeCoord::slot:
            X.C.set(L.blocks[f.bi].off + f.r, L.blocks[f.bj].off + f.c, v);
            break;
        case FreeCoord::z_star: X.zs[f.bi][0] = v; break;
        case FreeCoord::m_star: X.ms[f.bi][f.c] = v; break;
        case FreeCoord::m_star_star: X.mss[f.bi][f.r] = v; break;
        }
    }
    return X;
}

/* Solve the starred relations inside the lift.  Each relation pins exactly
 * one slot, so writing that slot as (pi * starred) minus the free terms
 * makes the relation an identity of lifts; products and transforms of such
 * matrices then carry their own starred coordinates implicitly. */
void fill_dependents(const Layout& L, Coords& X) {
    const RamifiedElem pi = RamifiedElem::pi(L.KF, L.delta);
    for (size_t t = 0; t < L.blocks.size(); ++t) {
        const Block& b = L.blocks[t];
        if (b.even_type_I()) {
            RamifiedElem ksum = RamifiedElem::zero(L.KF, L.delta);
            for (int s2 : {b.scale - 2, b.scale + 2}) {
                const int u = find_block(L, s2);
                if (u < 0 || !L.blocks[u].even_type_I()) continue;
                const Block& p = L.blocks[u];
                ksum = add(ksum, X.C.at(p.off + norm_row(p), b.off + b.rank - 1));
            }
            const auto [zr, zc] = z_slot(b);
            X.C.set(b.off + zr, b.off + zc, sub(mul(pi, X.zs[t][0]), ksum));
        }
        if (b.bound_odd_type_I()) {
            const Deps& d = L.deps[t];
            const Block& pd = L.blocks[d.row_dep];
            for (int c = 0; c < b.rank; ++c) {
                RamifiedElem rhs = mul(pi, X.ms[t][c]);
                if (d.row_other >= 0) {
                    const Block& po = L.blocks[d.row_other];
                    rhs = sub(rhs, X.C.at(po.off + norm_row(po), b.off + c));
                }
                X.C.set(pd.off + norm_row(pd), b.off + c, rhs);
            }
            const Block& qd = L.blocks[d.col_dep];
            for (int r = 0; r < b.rank; ++r) {
                RamifiedElem rhs = mul(pi, X.mss[t][r]);
                if (d.col_other >= 0) {
                    const Block& qo = L.blocks[d.col_other];
                    rhs = sub(rhs, X.C.at(b.off + r, qo.off + qo.rank - 1));
                }
                X.C.set(b.off + r, qd.off + qd.rank - 1, rhs);
            }
        }
    }
}

/* Assemble the model matrix: template wrapping on diagonal blocks, the
 * pi^(max(0, j-i)) prefactor elsewhere. */
BMatrix wrap(const Layout& L, const Coords& X) {
    BMatrix m = BMatrix::zeros(L.n, L.n, L.KF, L.delta);
    const RamifiedElem one = RamifiedElem::one(L.KF, L.delta);
    const RamifiedElem pi = RamifiedElem::pi(L.KF, L.delta);
    for (size_t ti = 0; ti < L.blocks.size(); ++ti)
        for (size_t tj = 0; tj < L.blocks.size(); ++tj) {
            const Block& bi = L.blocks[ti];
            const Block& bj = L.blocks[tj];
            const int pow = std::max(0, bj.scale - bi.scale);
            for (int r = 0; r < bi.rank; ++r)
                for (int c = 0; c < bj.rank; ++c) {
                    const RamifiedElem& v = X.C.at(bi.off + r, bj.off + c);
                    RamifiedElem w = v;
                    if (ti == tj) {
                        switch (diag_role(bi, r, c)) {
                        case SlotRole::plain: break;
                        case SlotRole::pi_times: w = mul(pi, v); break;
                        case SlotRole::one_plus_pi: w = add(one, mul(pi, v)); break;
                        }
                    } else if (pow > 0) {
                        w = mul(L.pipow[pow], v);
                    }
                    m.set(bi.off + r, bj.off + c, w);
                }
        }
    return m;
}

/* Membership of an assembled candidate: invertible, reproduces the normal
 * form at every slot depth, and keeps the starred hermitian coordinate of
 * each bound odd type I scale at zero. */
bool member(const Layout& L, const BMatrix& m) {
    if ((det(m).a & 1u) == 0) return false;
    const BMatrix D = sub(gram_transform(L.h, m), L.h);
    for (size_t ti = 0; ti < L.blocks.size(); ++ti)
        for (size_t tj = 0; tj < L.blocks.size(); ++tj) {
            const Block& bi = L.blocks[ti];
            const Block& bj = L.blocks[tj];
            for (int r = 0; r < bi.rank; ++r)
                for (int c = 0; c < bj.rank; ++c) {
                    const int need = slot_threshold(bi, bj, r, c, ti == tj);
                    if (pi_valuation(D.at(bi.off + r, bj.off + c)) < need)
                        return false;
                }
        }
    const RamifiedElem pi = RamifiedElem::pi(L.KF, L.delta);
    for (size_t t = 0; t < L.blocks.size(); ++t) {
        const Block& b = L.blocks[t];
        if (!b.bound_odd_type_I()) continue;
        const int lo = find_block(L, b.scale - 1);
        const int hi = find_block(L, b.scale + 1);
        for (int c = 0; c < b.rank; ++c) {
            RamifiedElem u = RamifiedElem::zero(L.KF, L.delta);
            if (lo >= 0 && L.blocks[lo].even_type_I()) {
                const Block& p = L.blocks[lo];
                u = add(u, mul(pi, D.at(p.off + p.rank - 1, b.off + c)));
            }
            if (hi >= 0 && L.blocks[hi].even_type_I()) {
                const Block& p = L.blocks[hi];
                u = add(u, D.at(p.off + p.rank - 1, b.off + c));
            }
            if (pi_valuation(u) < b.scale + 4) return false;
        }
    }
    return true;
}

RamifiedElem peel(const RamifiedElem& w, const RamifiedElem& divisor, const char* where) {
    if (pi_valuation(w) < pi_valuation(divisor))
        throw verification_error(std::string("fiber product left the model shape (") +
                                 where + ")");
    return divide_exact(w, divisor);
}

/* Read the coordinate tuple of an arbitrary matrix back off, verifying on
 * the way that it has the model shape: block divisibility, the template
 * pi patterns, and pi dividing every starred combination.  Used on products
 * of fiber points, where these divisibilities are the content of closure. */
uint64_t extract_code(const Layout& L, const BMatrix& P) {
    const int maxscale = L.blocks.empty() ? 0 : L.blocks.back().scale;
    const int KR = L.KF - (maxscale / 2 + 2);
    const RamifiedElem one = RamifiedElem::one(L.KF, L.delta);
    const RamifiedElem pi1 = RamifiedElem::pi(L.KF, L.delta);

    BMatrix C = BMatrix::zeros(L.n, L.n, KR, L.delta);
    for (size_t ti = 0; ti < L.blocks.size(); ++ti)
        for (size_t tj = 0; tj < L.blocks.size(); ++tj) {
            const Block& bi = L.blocks[ti];
            const Block& bj = L.blocks[tj];
            const int pow = std::max(0, bj.scale - bi.scale);
            for (int r = 0; r < bi.rank; ++r)
                for (int c = 0; c < bj.rank; ++c) {
                    const RamifiedElem& w = P.at(bi.off + r, bj.off + c);
                    RamifiedElem v = w;
                    if (ti == tj) {
                        switch (diag_role(bi, r, c)) {
                        case SlotRole::plain: break;
                        case SlotRole::pi_times:
                            v = peel(w, pi1, "pi pattern on a diagonal block");
                            break;
                        case SlotRole::one_plus_pi:
                            v = peel(sub(w, one), pi1, "unit pattern on a diagonal block");
                            break;
                        }
                    } else if (pow > 0) {
                        v = peel(w, L.pipow[pow], "scale gap divisibility");
                    }
                    C.set(bi.off + r, bj.off + c, reduce_precision(v, KR));
                }
        }

    const RamifiedElem piR = RamifiedElem::pi(KR, L.delta);
    auto kappa_bits = [](const RamifiedElem& v) -> uint64_t {
        return (uint64_t)(v.a & 1u) | ((uint64_t)(v.b & 1u) << 1);
    };

    uint64_t code = 0;
    for (size_t q = 0; q < L.frees.size(); ++q) {
        const FreeCoord& f = L.frees[q];
        RamifiedElem v = RamifiedElem::zero(KR, L.delta);
        switch (f.kind) {
        case FreeCoord::slot:
            v = C.at(L.blocks[f.bi].off + f.r, L.blocks[f.bj].off + f.c);
            break;
        case FreeCoord::z_star: {
            const Block& b = L.blocks[f.bi];
            const auto [zr, zc] = z_slot(b);
            RamifiedElem acc = C.at(b.off + zr, b.off + zc);
            for (int s2 : {b.scale - 2, b.scale + 2}) {
                const int u = find_block(L, s2);
                if (u < 0 || !L.blocks[u].even_type_I()) continue;
                const Block& p = L.blocks[u];
                acc = add(acc, C.at(p.off + norm_row(p), b.off + b.rank - 1));
            }
            v = peel(acc, piR, "z star relation of an even type I scale");
            break;
        }
        case FreeCoord::m_star: {
            const Block& b = L.blocks[f.bi];
            RamifiedElem acc = RamifiedElem::zero(KR, L.delta);
            for (int s2 : {b.scale - 1, b.scale + 1}) {
                const int u = find_block(L, s2);
                if (u < 0 || !L.blocks[u].even_type_I()) continue;
                const Block& p = L.blocks[u];
                acc = add(acc, C.at(p.off + norm_row(p), b.off + f.c));
            }
            v = peel(acc, piR, "m star relation of a bound odd scale");
            break;
        }
        case FreeCoord::m_star_star: {
            const Block& b = L.blocks[f.bi];
            RamifiedElem acc = RamifiedElem::zero(KR, L.delta);
            for (int s2 : {b.scale - 1, b.scale + 1}) {
                const int u = find_block(L, s2);
                if (u < 0 || !L.blocks[u].even_type_I()) continue;
                const Block& p = L.blocks[u];
                acc = add(acc, C.at(b.off + f.r, p.off + p.rank - 1));
            }
            v = peel(acc, piR, "m star star relation of a bound odd scale");
            break;
        }
        }
        code |= kappa_bits(v) << (2 * q);
    }
    return code;
}

uint64_t splitmix64(uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct PointSet {
    std::vector<uint64_t> codes;
    std::unordered_set<uint64_t> index;
};

PointSet enumerate_set(const Layout& L, const FiberLimits& lim, bool need_all) {
    const int bits = 2 * (int)L.frees.size();
    if (bits >= 63)
        throw capability_error("fiber model: coordinate space too large to enumerate");
    const uint64_t total = 1ull << bits;
    if (need_all && total > lim.max_points)
        throw capability_error("fiber model: coordinate space exceeds the enumeration budget");
    PointSet S;
    for (uint64_t code = 0; code < total && code < lim.max_points; ++code) {
        Coords X = decode(L, code);
        fill_dependents(L, X);
        if (member(L, wrap(L, X))) {
            S.codes.push_back(code);
            S.index.insert(code);
        }
    }
    return S;
}

} // namespace

FiberResult enumerate_fiber_points(const JordanDecomposition& dec, const FiberLimits& lim) {
    const Layout L = build_layout(hyperbolize_bound_scales(dec));
    if (L.n > lim.max_rank)
        throw capability_error("enumerate_fiber_points: total rank " + std::to_string(L.n) +
                               " exceeds the supported bound " + std::to_string(lim.max_rank));
    if (L.n == 0) return FiberResult{1, 0, false};

    const int bits = 2 * (int)L.frees.size();
    if (bits >= 63)
        throw capability_error("enumerate_fiber_points: coordinate space too large");
    const uint64_t total = 1ull << bits;

    FiberResult res;
    uint64_t hits = 0;
    for (uint64_t code = 0; code < total; ++code) {
        if (res.enumerated == lim.max_points) {
            res.partial = true;
            break;
        }
        ++res.enumerated;
        Coords X = decode(L, code);
        fill_dependents(L, X);
        if (member(L, wrap(L, X))) ++hits;
    }
    res.count = mpz_class((unsigned long)hits);
    return res;
}

int check_fj_equations(const JordanDecomposition& dec, int j) {
    const Layout L = build_layout(hyperbolize_bound_scales(dec));

    const int t = find_block(L, j);
    const bool even = (j & 1) == 0;
    bool qualifies = t >= 0 && (L.blocks[t].even_type_I() ||
                                L.blocks[t].tag == TypeTag::I_odd_scale);
    if (qualifies) {
        if (even) {
            qualifies = !L.prof.effective_type_I(j + 2) &&
                        !L.prof.effective_type_I(j + 3) &&
                        !L.prof.effective_type_I(j + 4);
        } else {
            qualifies = !L.prof.effective_type_I(j - 1) &&
                        !L.prof.effective_type_I(j + 1) &&
                        !L.prof.effective_type_I(j + 2) &&
                        !L.prof.effective_type_I(j + 3);
        }
    }
    if (!qualifies)
        throw std::domain_error("check_fj_equations: scale " + std::to_string(j) +
                                " does not carry a component counting subgroup");

    const Block& b = L.blocks[t];
    /* The subgroup fixes every coordinate at the identity except a two
     * dimensional slice of the block at scale j; sixteen raw candidates
     * cover it, with a trivial z slice when the block has a unit corner. */
    std::vector<std::pair<uint32_t, uint32_t>> duo = {
        {0, 0}, {1, 0}, {0, 1}, {1, 1}};

    int count = 0, nontrivial = 0;
    for (const auto& [xa, xb] : duo)
        for (const auto& [za, zb] : duo) {
            Coords X = blank_coords(L);
            for (size_t ti = 0; ti < L.blocks.size(); ++ti) {
                const Block& bb = L.blocks[ti];
                for (int r = 0; r < bb.rank; ++r)
                    for (int c = 0; c < bb.rank; ++c)
                        if (r == c && diag_role(bb, r, c) == SlotRole::plain)
                            X.C.set(bb.off + r, bb.off + c, RamifiedElem::one(L.KF, L.delta));
            }
            const RamifiedElem x = RamifiedElem::make(xa, xb, L.KF, L.delta);
            const RamifiedElem z = RamifiedElem::make(za, zb, L.KF, L.delta);
            bool class_bit = false;
            if (b.tag == TypeTag::I_odd_rank) {
                if (!(xa == 0 && xb == 0)) continue;  // no x slice on a unit corner
                X.zs[t][0] = z;
                class_bit = (za & 1u) != 0;
            } else if (b.tag == TypeTag::I_even_rank) {
                X.C.set(b.off + b.rank - 2, b.off + b.rank - 2, x);
                X.zs[t][0] = z;
                class_bit = (za & 1u) != 0;
            } else {
                X.C.set(b.off + b.rank - 2, b.off + b.rank - 2, x);
                X.C.set(b.off + b.rank - 1, b.off + b.rank - 2, z);
                class_bit = (za & 1u) != 0;
            }
            fill_dependents(L, X);
            if (!member(L, wrap(L, X))) continue;
            ++count;
            if (class_bit) ++nontrivial;
        }

    if (count != 4)
        throw verification_error("component counting subgroup at scale " + std::to_string(j) +
                                 " has " + std::to_string(count) + " points instead of 4");
    if (nontrivial != 2)
        throw verification_error("component counting subgroup at scale " + std::to_string(j) +
                                 " splits " + std::to_string(nontrivial) +
                                 "/4 on the class bit instead of 2/4");
    return count;
}

void fiber_closure_check(const JordanDecomposition& dec, int pairs, uint64_t seed) {
    const Layout L = build_layout(hyperbolize_bound_scales(dec));
    const FiberLimits lim;
    if (L.n > lim.max_rank)
        throw capability_error("fiber_closure_check: total rank " + std::to_string(L.n) +
                               " exceeds the supported bound " + std::to_string(lim.max_rank));
    if (L.n == 0) return;

    const PointSet S = enumerate_set(L, lim, true);
    if (S.codes.empty())
        throw verification_error("fiber closure: the point set is empty");

    const uint64_t id_code = extract_code(L, BMatrix::identity(L.n, L.KF, L.delta));
    if (!S.index.count(id_code))
        throw verification_error("fiber closure: the identity is missing from the point set");

    auto realize = [&](uint64_t code) {
        Coords X = decode(L, code);
        fill_dependents(L, X);
        return wrap(L, X);
    };

    uint64_t state = seed ? seed : 0x5eedull;
    for (int k = 0; k < pairs; ++k) {
        const uint64_t a = S.codes[splitmix64(state) % S.codes.size()];
        const uint64_t b = S.codes[splitmix64(state) % S.codes.size()];
        const BMatrix P = mul(realize(a), realize(b));
        const uint64_t c = extract_code(L, P);
        if (!S.index.count(c))
            throw verification_error("fiber closure: a product of points leaves the set");
    }
}

} // namespace hermdens
