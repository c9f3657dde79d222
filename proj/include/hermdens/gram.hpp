#pragma once

#include <string>
#include <vector>

#include "hermdens/bmatrix.hpp"

namespace hermdens {

/* Gram matrix of a hermitian form on a free module over the ramified order.
 * Convention: entry (i,j) is h(v_i, v_j) with h conjugate-linear in the
 * FIRST argument, so the matrix satisfies G(j,i) = conj(G(i,j)) and the
 * diagonal is fixed by conjugation. */
struct HermitianGram {
    int n = 0;
    BMatrix m;

    static HermitianGram from_matrix(const BMatrix& G);
    int K() const { return m.K; }
    uint32_t delta() const { return m.delta; }
};

struct GramDiagnostics {
    bool ok = true;
    std::vector<std::string> issues;
};

/* Structural checks: squareness, the hermitian symmetry, conjugation-fixed
 * diagonal, and a determinant valuation small enough that downstream
 * splitting can trust the digits it has.  Every complaint names the entry. */
GramDiagnostics validate_gram(const HermitianGram& G);

/* pi-exponents of the scale ideal s(L) (all pairings) and the norm ideal
 * n(L) (diagonal values and traces of off-diagonal pairings). */
struct ScaleNorm {
    int scale_exp;
    int norm_exp;
};
ScaleNorm scale_norm_ideals(const HermitianGram& G);

} // namespace hermdens
