#pragma once

#include <string>
#include <vector>

#include "hermdens/gram.hpp"

namespace hermdens {

/* Normal-form tails.  Every component splits as hyperbolic planes plus at
 * most one of these blocks (scaled by xi^(i/2) at even scale i, and by
 * xi^((i-1)/2) with the pi kept inside the block at odd i, xi = -2*delta):
 *
 *   unit            (a)                       a odd, class-canonical mod 8
 *   A_1_2b_1        [[1,1],[1,2b]]
 *   A_2delta_2b_1   [[2d,1],[1,2b]]           emitted with b = 1
 *   A_4a_2delta_pi  [[4a,pi],[-pi,2d]]        a in {0,1}
 *
 * "none" covers fully hyperbolic components at any scale. */
enum class TailKind { none, unit, A_1_2b_1, A_2delta_2b_1, A_4a_2delta_pi };

std::string tail_kind_name(TailKind t);

struct JordanComponent {
    int scale = 0;
    int rank = 0;
    int hyperbolic_count = 0;
    TailKind tail = TailKind::none;
    uint32_t unit_a = 0;  // unit tail: canonical odd residue mod 8
    int64_t b_param = 0;  // the b of A(1,2b,1) / A(2delta,2b,1)
    int64_t a_param = 0;  // the a of A(4a,2delta,pi)

    int tail_rank() const;

    /* Exact Gram block this component stands for.  Requires scale >= 0. */
    BMatrix gram_block(int K, uint32_t delta) const;

    uint32_t bbar() const;  // splitness residue (even type II); 0 for hyperbolic
    int gammabar() const;   // corner residue bit used by the fiber model
};

struct JordanDecomposition {
    std::vector<JordanComponent> comps;  // strictly increasing scale
    BMatrix U;            // basis change: conj_transpose(U) * G * U == normal_form
    BMatrix normal_form;  // block diagonal, entries exact
    int K = kDefaultPrecision;
    uint32_t delta = 1;

    int total_rank() const;
};

/* Split G into pi^i-modular components and normalize each to the standard
 * shape above.  The transform U is unimodular and the equality
 * conj_transpose(U) G U == normal_form holds digit for digit (at the reduced
 * precision the normalization left over).  Throws precision_error when the
 * input precision cannot support the pivots encountered; retry with a larger
 * working precision in that case. */
JordanDecomposition jordan_split(const HermitianGram& G);

BMatrix assemble_normal_form(const std::vector<JordanComponent>& comps, int K, uint32_t delta);

/* Deterministic pseudo-random unimodular basis change of G (same lattice in
 * a scrambled basis). */
HermitianGram random_isometry_conjugate(const HermitianGram& G, uint64_t seed);

} // namespace hermdens
