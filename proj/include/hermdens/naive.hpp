#pragma once

#include <vector>

#include <gmpxx.h>

#include "hermdens/density.hpp"
#include "hermdens/gram.hpp"

namespace hermdens {

struct CountSequence {
    std::vector<mpz_class> counts;  // automorphism counts mod 2^k, k = 1..kmax
    std::vector<mpq_class> ratios;  // counts[k-1] / 2^(k n^2)
    bool stabilized = false;
    int stable_level = -1;          // first k of the stable run
    mpq_class density;              // the stabilized ratio
};

/* Number of matrices g over B/2^k with conj_transpose(g) G g == G mod 2^k
 * and g invertible.  Exact but exponential; rank 2 at k = 8 fits the state
 * budget, rank 3 does not. */
mpz_class count_automorphisms_mod(const HermitianGram& G, int k);

/* Counts for k = 1..kmax via level lifting on merged states, with the
 * stabilization check (two consecutive equal ratios plus one confirmation). */
CountSequence density_estimate(const HermitianGram& G, int kmax);

/* Order of a classical group over F_2 by brute enumeration of matrices
 * preserving the standard form; cross-checks the closed-form orders.
 * Supports dim <= 4 (and 5 for the odd orthogonal kind via its symplectic
 * twin); throws capability_error beyond. */
mpz_class brute_group_order(const ReductiveFactor& g);

} // namespace hermdens
