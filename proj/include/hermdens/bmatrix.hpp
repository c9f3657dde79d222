#pragma once

#include <vector>

#include "hermdens/ramified.hpp"

namespace hermdens {

/* Dense matrix over the ramified order.  All entries share one precision and
 * one delta, enforced on construction and mutation. */
struct BMatrix {
    int rows = 0, cols = 0;
    int K = kDefaultPrecision;
    uint32_t delta = 1;
    std::vector<RamifiedElem> e;

    static BMatrix zeros(int r, int c, int K, uint32_t delta);
    static BMatrix identity(int n, int K, uint32_t delta);

    RamifiedElem& at(int i, int j) { return e[(size_t)i * cols + j]; }
    const RamifiedElem& at(int i, int j) const { return e[(size_t)i * cols + j]; }

    void set(int i, int j, const RamifiedElem& v);

    bool operator==(const BMatrix& o) const = default;
};

BMatrix mul(const BMatrix& A, const BMatrix& B);
BMatrix add(const BMatrix& A, const BMatrix& B);
BMatrix sub(const BMatrix& A, const BMatrix& B);
BMatrix conj_transpose(const BMatrix& A);
BMatrix scalar_mul(const RamifiedElem& c, const BMatrix& A);

// determinant by minor expansion over column subsets; fine for small ranks
RamifiedElem det(const BMatrix& A);

BMatrix reduce_precision(const BMatrix& A, int new_K);

// sigma^t(U) * G * U, the Gram matrix after the basis change U
BMatrix gram_transform(const BMatrix& G, const BMatrix& U);

} // namespace hermdens
