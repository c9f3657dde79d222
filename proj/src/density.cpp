#include "hermdens/density.hpp"

#include <cassert>

#include "hermdens/errors.hpp"
#include "hermdens/residue_field.hpp"

namespace hermdens {

std::string ReductiveFactor::name() const {
    switch (kind) {
        case GroupKind::even_orthogonal:
            return std::string(sign >= 0 ? "O+(" : "O-(") + std::to_string(dim) + ")";
        case GroupKind::odd_orthogonal: return "OO(" + std::to_string(dim) + ")";
        case GroupKind::symplectic: return "Sp(" + std::to_string(dim) + ")";
    }
    return "?";
}

namespace {

bool is_even(int i) { return ((i % 2) + 2) % 2 == 0; }

// free odd type I scales
long count_a(const TypeProfile& p) {
    long a = 0;
    for (const auto& s : p.scales)
        if (!s.even_scale() && s.type_I() && !s.bound) ++a;
    return a;
}

long sum_cross(const TypeProfile& p, int mode) {
    // mode 0: min(i,j) n_i n_j, 1: max(i,j) n_i n_j, 2: (j-i) n_i n_j, 3: n_i n_j
    long t = 0;
    for (size_t x = 0; x < p.scales.size(); ++x)
        for (size_t y = x + 1; y < p.scales.size(); ++y) {
            long ni = p.scales[x].rank, nj = p.scales[y].rank;
            long i = p.scales[x].scale, j = p.scales[y].scale;
            long w = mode == 0 ? i : mode == 1 ? j : mode == 2 ? (j - i) : 1;
            t += w * ni * nj;
        }
    return t;
}

} // namespace

long exponent_N_direct(const TypeProfile& p) {
    long N = sum_cross(p, 0);
    for (const auto& s : p.scales) {
        long ni = s.rank, i = s.scale;
        N += (s.even_scale() ? (i + 2) / 2 : (i + 3) / 2) * ni;
        N += i * ni * (ni - 1) / 2;
        if (s.type_I()) N -= ni;
    }
    return N;
}

long exponent_N_via_models(const TypeProfile& p, long* out_NM, long* out_NH) {
    long a = count_a(p);
    long NM = sum_cross(p, 2) - a;
    long NH = sum_cross(p, 1) - a;
    for (const auto& s : p.scales) {
        long ni = s.rank, i = s.scale;
        if (s.type_I()) {
            NM += 2 * ni;
            NH += ni;
        }
        NH += (s.even_scale() ? (i + 2) / 2 : (i + 3) / 2) * ni;
        NH += i * ni * (ni - 1) / 2;
    }
    if (out_NM) *out_NM = NM;
    if (out_NH) *out_NH = NH;
    return NH - NM;
}

long beta_count(const TypeProfile& p) {
    long beta = 0;
    for (const auto& s : p.scales) {
        if (!s.type_I()) continue;
        int j = s.scale;
        bool ok;
        if (s.even_scale())
            ok = !p.effective_type_I(j + 2) && !p.effective_type_I(j + 3) && !p.effective_type_I(j + 4);
        else
            ok = !p.effective_type_I(j - 1) && !p.effective_type_I(j + 1) &&
                 !p.effective_type_I(j + 2) && !p.effective_type_I(j + 3);
        if (ok) ++beta;
    }
    return beta;
}

std::vector<ReductiveFactor> reductive_factors(const TypeProfile& p) {
    std::vector<ReductiveFactor> out;
    ResidueField k(p.f_degree);
    for (const auto& s : p.scales) {
        ReductiveFactor g;
        g.source_scale = s.scale;
        if (s.even_scale()) {
            g.kind = GroupKind::odd_orthogonal;
            if (s.tag == TypeTag::I_odd_rank) g.dim = s.rank;
            else if (s.tag == TypeTag::I_even_rank) g.dim = s.rank - 1;
            else if (s.bound) g.dim = s.rank + 1;
            else {
                g.kind = GroupKind::even_orthogonal;
                g.dim = s.rank;
                g.sign = k.trace(s.bbar) == 0 ? +1 : -1;
            }
        } else {
            g.kind = GroupKind::symplectic;
            g.dim = (s.type_I() && !s.bound) ? s.rank - 2 : s.rank;
        }
        if (g.dim < 0) throw config_error("reductive_factors: negative factor dimension");
        out.push_back(g);
    }
    return out;
}

long classical_group_dim(const ReductiveFactor& g) {
    long d = g.dim;
    if (g.kind == GroupKind::symplectic) return d * (d + 1) / 2;
    return d * (d - 1) / 2;
}

mpz_class classical_group_order(const ReductiveFactor& g, const mpz_class& f) {
    auto fpow = [&](long e) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), f.get_mpz_t(), (unsigned long)e);
        return r;
    };
    if (g.dim == 0) return 1;
    if (g.kind == GroupKind::even_orthogonal) {
        if (g.dim % 2 != 0) throw config_error("even orthogonal factor of odd size");
        long m = g.dim / 2;
        mpz_class r = 2 * fpow(m * (m - 1)) * (fpow(m) - g.sign);
        for (long i = 1; i < m; ++i) r *= fpow(2 * i) - 1;
        return r;
    }
    long m = g.kind == GroupKind::symplectic ? g.dim / 2 : (g.dim - 1) / 2;
    if (g.kind == GroupKind::symplectic && g.dim % 2 != 0)
        throw config_error("symplectic factor of odd size");
    mpz_class r = fpow(m * m);
    for (long i = 1; i <= m; ++i) r *= fpow(2 * i) - 1;
    return r;
}

long fiber_dimension(const TypeProfile& p) { return (long)p.n * p.n; }

long unipotent_dimension(const TypeProfile& p) {
    long l = fiber_dimension(p);
    for (const auto& g : reductive_factors(p)) l -= classical_group_dim(g);
    if (l < 0) throw verification_error("unipotent dimension came out negative");
    return l;
}

// dimension of the norm-one subgroup scheme's fiber
long norm_one_dimension(const TypeProfile& p) {
    long d = sum_cross(p, 3);
    for (const auto& s : p.scales) {
        long ni = s.rank;
        d += s.even_scale() ? ni * (ni + 1) / 2 : ni * (ni - 1) / 2;
        if (s.even_scale() && s.type_I()) {
            d -= 1;
            if (!p.effective_type_I(s.scale + 2)) d += 1;
        }
        if (!s.even_scale() && s.type_I() && !s.bound) d += 1;
    }
    return d;
}

long unipotent_point_exponent(const TypeProfile& p) {
    long lp = sum_cross(p, 3);
    for (const auto& s : p.scales) {
        long ni = s.rank;
        if (s.even_scale()) {
            if (s.tag == TypeTag::I_even_rank) lp += ni - 1;
            if (s.type_I()) {
                lp += 1;
                if (!p.effective_type_I(s.scale + 2)) lp -= 1;
            }
            if (s.tag == TypeTag::II_even && s.bound) lp -= ni;
        } else {
            if (s.type_I() && !s.bound) lp += 2 * ni - 2;
        }
    }
    return lp;
}

mpz_class special_fiber_count(const TypeProfile& p) {
    mpz_class f = 1;
    mpz_mul_2exp(f.get_mpz_t(), f.get_mpz_t(), (unsigned long)p.f_degree);
    mpz_class c = 1;
    mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(), (unsigned long)beta_count(p));
    mpz_class fl;
    mpz_pow_ui(fl.get_mpz_t(), f.get_mpz_t(), (unsigned long)unipotent_dimension(p));
    c *= fl;
    for (const auto& g : reductive_factors(p)) c *= classical_group_order(g, f);
    return c;
}

DensityReport local_density(const TypeProfile& p) {
    DensityReport r;
    r.n = p.n;
    r.f_degree = p.f_degree;
    r.N = exponent_N_via_models(p, &r.N_M, &r.N_H);
    long direct = exponent_N_direct(p);
    if (direct != r.N)
        throw verification_error("density exponent mismatch between the two bookkeeping routes");
    r.a_count = count_a(p);
    r.beta = beta_count(p);
    r.factors = reductive_factors(p);
    mpz_class f = 1;
    mpz_mul_2exp(f.get_mpz_t(), f.get_mpz_t(), (unsigned long)p.f_degree);
    for (const auto& g : r.factors) r.factor_orders.push_back(classical_group_order(g, f));
    r.l_unipotent = unipotent_dimension(p);
    r.dim_G1 = norm_one_dimension(p);
    r.l_prime = unipotent_point_exponent(p);
    r.fiber_count = special_fiber_count(p);

    long e = r.N - (long)p.n * p.n;
    mpz_class fe;
    mpz_pow_ui(fe.get_mpz_t(), f.get_mpz_t(), (unsigned long)(e < 0 ? -e : e));
    if (e >= 0) r.beta_L = mpq_class(r.fiber_count * fe);
    else r.beta_L = mpq_class(r.fiber_count, fe);
    r.beta_L.canonicalize();
    return r;
}

} // namespace hermdens
