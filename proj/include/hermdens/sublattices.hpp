#pragma once

#include <vector>

#include "hermdens/classify.hpp"
#include "hermdens/jordan.hpp"

namespace hermdens {

/* Dimensions of the invariant sublattice chain at one scale, all computed
 * over the residue field with f = 2 by direct linear algebra on A_i (the
 * sublattice pairing into pi^i): radical X, norm-kernel B, enlarged W,
 * alternating radical Y, and the quadratic kernel Z inside B.  Z only
 * exists at even scales, Y is reported at odd ones. */
struct SublatticeDims {
    int scale = 0;
    int rank = 0;          // n_i
    int dim_A_mod_B = 0;   // 0 or 1
    int dim_W_mod_X = 0;   // 0 or 1
    int dim_B_mod_Z = -1;  // even scales, else -1
    int dim_B_mod_Y = -1;  // odd scales, else -1
};

/* One record per component scale of the decomposition. */
std::vector<SublatticeDims> invariant_sublattices(const JordanDecomposition& dec);

/* What the per-type closed forms predict for the same scale; used to
 * cross-check the direct computation. */
SublatticeDims predicted_sublattice_dims(const TypeProfile& profile, int scale);

} // namespace hermdens
