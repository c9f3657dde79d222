#pragma once

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hermdens/classify.hpp"

namespace hermdens {

enum class GroupKind { even_orthogonal, odd_orthogonal, symplectic };

struct ReductiveFactor {
    GroupKind kind = GroupKind::symplectic;
    int dim = 0;        // matrix size the group acts on
    int sign = 0;       // +1 split / -1 nonsplit, even orthogonal only
    int source_scale = 0;

    std::string name() const;  // e.g. "Sp(2)", "O+(2)", "OO(3)"
};

/* Everything the density formula produces, kept separate so the oracles can
 * cross-examine each intermediate. */
struct DensityReport {
    int n = 0;
    int f_degree = 1;

    long N_M = 0;  // dimension-like exponent of the automorphism model
    long N_H = 0;  //   ... of the hermitian-forms model
    long N = 0;    // N_H - N_M
    long a_count = 0;           // odd free type I scales
    long beta = 0;              // component-group exponent: pi_0 has 2^beta points
    long dim_G1 = 0;            // dimension of the special fiber group
    long l_unipotent = 0;       // dimension of the unipotent kernel
    long l_prime = 0;           // unipotent part of the fiber point count exponent

    std::vector<ReductiveFactor> factors;
    std::vector<mpz_class> factor_orders;

    mpz_class fiber_count;  // #G(F_f) = f^l_unipotent * 2^beta * prod(orders)
    mpq_class beta_L;       // local density f^(N - n^2) * fiber_count
};

/* Exponent bookkeeping (N via both routes), component count, factor list,
 * unipotent dimensions.  All take the effective types, so gaps in the scale
 * range behave per the zero-lattice conventions. */
long exponent_N_direct(const TypeProfile& p);
long exponent_N_via_models(const TypeProfile& p, long* out_NM = nullptr, long* out_NH = nullptr);
long beta_count(const TypeProfile& p);
std::vector<ReductiveFactor> reductive_factors(const TypeProfile& p);
long fiber_dimension(const TypeProfile& p);       // dim of the whole fiber group
long unipotent_dimension(const TypeProfile& p);   // l, with l + sum(factor dims) = n^2
long norm_one_dimension(const TypeProfile& p);    // dim of the norm-one part
long unipotent_point_exponent(const TypeProfile& p);  // l'

long classical_group_dim(const ReductiveFactor& g);
mpz_class classical_group_order(const ReductiveFactor& g, const mpz_class& f);

mpz_class special_fiber_count(const TypeProfile& p);

DensityReport local_density(const TypeProfile& p);

} // namespace hermdens
