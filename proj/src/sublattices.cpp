#include "hermdens/sublattices.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "hermdens/errors.hpp"
#include "hermdens/f2.hpp"

namespace hermdens {

namespace {

RamifiedElem pi_pow(int t, int K, uint32_t delta) {
    RamifiedElem p = RamifiedElem::one(K, delta);
    for (int j = 0; j < t; ++j) p = mul(p, RamifiedElem::pi(K, delta));
    return p;
}

/* Gram matrix of A_i = sum_s pi^max(0,i-s) L_s in the normal-form basis.
 * Scaling basis vector j by pi^t multiplies pairings by conj(pi^t) on the
 * left and pi^t on the right; cross-scale entries stay zero because the
 * normal form is block diagonal. */
BMatrix sublattice_gram(const std::vector<JordanComponent>& comps, int i, int K, uint32_t delta) {
    BMatrix nf = assemble_normal_form(comps, K, delta);
    std::vector<int> t;
    for (const auto& c : comps)
        for (int j = 0; j < c.rank; ++j) t.push_back(std::max(0, i - c.scale));
    BMatrix g = BMatrix::zeros(nf.rows, nf.cols, K, delta);
    for (int r = 0; r < nf.rows; ++r)
        for (int c2 = 0; c2 < nf.cols; ++c2)
            g.set(r, c2, mul(conj(pi_pow(t[(size_t)r], K, delta)),
                             mul(nf.at(r, c2), pi_pow(t[(size_t)c2], K, delta))));
    return g;
}

int bit_of(uint64_t v, int j) { return (int)((v >> j) & 1u); }

/* q(x) for an F2 coefficient vector lifted with 0/1 entries: diagonal terms
 * plus the trace of each off-diagonal pairing. */
RamifiedElem lift_norm(const BMatrix& g, uint64_t x) {
    RamifiedElem q = RamifiedElem::zero(g.K, g.delta);
    for (int j = 0; j < g.rows; ++j) {
        if (!bit_of(x, j)) continue;
        q = add(q, g.at(j, j));
        for (int k = j + 1; k < g.cols; ++k)
            if (bit_of(x, k)) {
                RamifiedElem p = g.at(j, k);
                q = add(q, add(p, conj(p)));
            }
    }
    return q;
}

/* Bit `sh` of a norm value that is guaranteed real with 2-valuation >= sh;
 * both guarantees are checked because they are theorems, not assumptions. */
int norm_bit(const RamifiedElem& v, int sh, const char* what) {
    if (v.b != 0)
        throw verification_error(std::string(what) + ": norm value has a pi part");
    if (sh > 0 && (v.a & ((1u << sh) - 1u)) != 0)
        throw verification_error(std::string(what) + ": norm valuation below the expected level");
    return (int)((v.a >> sh) & 1u);
}

}  // namespace

std::vector<SublatticeDims> invariant_sublattices(const JordanDecomposition& dec) {
    std::vector<SublatticeDims> out;
    if (dec.comps.empty()) return out;

    int n = 0, maxscale = 0;
    for (const auto& c : dec.comps) {
        n += c.rank;
        maxscale = std::max(maxscale, c.scale);
    }
    if (n > 63)
        throw capability_error("invariant_sublattices: rank exceeds the packed F2 width");
    const int Kw = std::max(kDefaultPrecision, 2 * maxscale + 8);

    for (const auto& comp : dec.comps) {
        const int i = comp.scale;
        const bool even = (i % 2) == 0;
        const int m = (i + (i % 2)) / 2;
        BMatrix g = sublattice_gram(dec.comps, i, Kw, dec.delta);
        RamifiedElem pii = pi_pow(i, Kw, dec.delta);

        // pairing S = (1/pi^i) h mod pi and norm functional T = (1/2^m) q mod 2
        std::vector<uint64_t> srows((size_t)n, 0);
        for (int r = 0; r < n; ++r)
            for (int c2 = 0; c2 < n; ++c2) {
                const RamifiedElem& v = g.at(r, c2);
                if (v.is_zero()) continue;
                if (divide_exact(v, pii).a & 1u) srows[(size_t)r] |= 1ull << c2;
            }
        uint64_t trow = 0;
        for (int r = 0; r < n; ++r)
            if (norm_bit(g.at(r, r), m, "invariant_sublattices[T]")) trow |= 1ull << r;

        std::vector<uint64_t> bbasis = f2_kernel_basis({trow}, n);
        const int dim_b = (int)bbasis.size();

        SublatticeDims d;
        d.scale = i;
        d.rank = comp.rank;
        d.dim_A_mod_B = n - dim_b;

        if (even && trow != 0) {
            // W/X is spanned by the vector representing T through S; it must
            // exist whenever T is nonzero, or the pairing lost the functional.
            F2System sys(n);
            for (int r = 0; r < n; ++r) sys.add_row(srows[(size_t)r], bit_of(trow, r));
            if (!f2_solve(sys).solvable)
                throw verification_error("invariant_sublattices: norm functional not represented by the pairing");
            d.dim_W_mod_X = 1;
        }

        // Y = vectors of B pairing into the next level against all of B
        std::vector<uint64_t> yrows{trow};
        for (uint64_t b : bbasis) {
            uint64_t row = 0;
            for (int r = 0; r < n; ++r)
                if (bit_of(b, r)) row ^= srows[(size_t)r];
            yrows.push_back(row);
        }
        std::vector<uint64_t> ybasis = f2_kernel_basis(yrows, n);
        const int dim_b_mod_y = dim_b - (int)ybasis.size();

        if (even) {
            // Z is the kernel of the level m+1 norm functional on Y_i/piB_i,
            // whose basis is the lifted Y basis plus pi times a complement of
            // B in A (at most one vector, since B is a hyperplane or all).
            int t2 = 0;
            for (uint64_t y : ybasis)
                t2 |= norm_bit(lift_norm(g, y), m + 1, "invariant_sublattices[Z]");
            if (d.dim_A_mod_B == 1) {
                uint64_t e = trow & (~trow + 1);  // basis vector with T(e) = 1
                RamifiedElem q = mul(RamifiedElem::from_int(-2 * (int64_t)dec.delta, Kw, dec.delta),
                                     lift_norm(g, e));
                t2 |= norm_bit(q, m + 1, "invariant_sublattices[Z]");
            }
            d.dim_B_mod_Z = dim_b_mod_y + t2;
        } else {
            d.dim_B_mod_Y = dim_b_mod_y;
        }
        out.push_back(d);
    }
    return out;
}

SublatticeDims predicted_sublattice_dims(const TypeProfile& profile, int scale) {
    const ScaleType* s = profile.find(scale);
    if (s == nullptr)
        throw config_error("predicted_sublattice_dims: no component at that scale");
    SublatticeDims d;
    d.scale = scale;
    d.rank = s->rank;
    d.dim_A_mod_B = s->type_I() ? 1 : 0;
    if (s->even_scale()) {
        d.dim_W_mod_X = d.dim_A_mod_B;
        switch (s->tag) {
            case TypeTag::I_even_rank: d.dim_B_mod_Z = s->rank - 1; break;
            case TypeTag::I_odd_rank: d.dim_B_mod_Z = s->rank; break;
            default: d.dim_B_mod_Z = s->bound ? s->rank + 1 : s->rank; break;
        }
    } else {
        d.dim_W_mod_X = 0;
        d.dim_B_mod_Y = (s->type_I() && !s->bound) ? s->rank - 2 : s->rank;
    }
    return d;
}

} // namespace hermdens
