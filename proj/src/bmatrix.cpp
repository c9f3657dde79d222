#include "hermdens/bmatrix.hpp"

namespace hermdens {

BMatrix BMatrix::zeros(int r, int c, int K, uint32_t delta) {
    BMatrix m;
    m.rows = r;
    m.cols = c;
    m.K = K;
    m.delta = delta & precision_mask(K);
    m.e.assign((size_t)r * c, RamifiedElem::zero(K, m.delta));
    return m;
}

BMatrix BMatrix::identity(int n, int K, uint32_t delta) {
    BMatrix m = zeros(n, n, K, delta);
    for (int i = 0; i < n; ++i) m.at(i, i) = RamifiedElem::one(K, m.delta);
    return m;
}

void BMatrix::set(int i, int j, const RamifiedElem& v) {
    if (v.K != K || v.delta != delta)
        throw config_error("BMatrix::set: incompatible element");
    at(i, j) = v;
}

static void check_same_ring(const BMatrix& A, const BMatrix& B, const char* who) {
    if (A.K != B.K || A.delta != B.delta)
        throw config_error(std::string(who) + ": mixed rings");
}

BMatrix mul(const BMatrix& A, const BMatrix& B) {
    check_same_ring(A, B, "BMatrix mul");
    if (A.cols != B.rows)
        throw config_error("BMatrix mul: shape mismatch");
    BMatrix C = BMatrix::zeros(A.rows, B.cols, A.K, A.delta);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const RamifiedElem& a = A.at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = add(C.at(i, j), mul(a, B.at(k, j)));
        }
    return C;
}

BMatrix add(const BMatrix& A, const BMatrix& B) {
    check_same_ring(A, B, "BMatrix add");
    if (A.rows != B.rows || A.cols != B.cols)
        throw config_error("BMatrix add: shape mismatch");
    BMatrix C = A;
    for (size_t i = 0; i < C.e.size(); ++i) C.e[i] = add(A.e[i], B.e[i]);
    return C;
}

BMatrix sub(const BMatrix& A, const BMatrix& B) {
    check_same_ring(A, B, "BMatrix sub");
    if (A.rows != B.rows || A.cols != B.cols)
        throw config_error("BMatrix sub: shape mismatch");
    BMatrix C = A;
    for (size_t i = 0; i < C.e.size(); ++i) C.e[i] = sub(A.e[i], B.e[i]);
    return C;
}

BMatrix conj_transpose(const BMatrix& A) {
    BMatrix C = BMatrix::zeros(A.cols, A.rows, A.K, A.delta);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j)
            C.at(j, i) = conj(A.at(i, j));
    return C;
}

BMatrix scalar_mul(const RamifiedElem& c, const BMatrix& A) {
    if (c.K != A.K || c.delta != A.delta)
        throw config_error("scalar_mul: mixed rings");
    BMatrix C = A;
    for (auto& x : C.e) x = mul(c, x);
    return C;
}

/* Laplace expansion along the first remaining row, memoized on the column
 * subset.  Exponential in n but our lattices are small. */
static RamifiedElem det_rec(const BMatrix& A, int row, uint32_t colmask,
                            std::vector<RamifiedElem>& memo, std::vector<char>& have) {
    if (colmask == 0) return RamifiedElem::one(A.K, A.delta);
    if (have[colmask]) return memo[colmask];
    RamifiedElem acc = RamifiedElem::zero(A.K, A.delta);
    int sign = 1;
    for (int j = 0; j < A.cols; ++j) {
        if (!(colmask & (1u << j))) continue;
        const RamifiedElem& a = A.at(row, j);
        if (!a.is_zero()) {
            RamifiedElem minor = det_rec(A, row + 1, colmask & ~(1u << j), memo, have);
            RamifiedElem term = mul(a, minor);
            acc = (sign > 0) ? add(acc, term) : sub(acc, term);
        }
        sign = -sign;
    }
    have[colmask] = 1;
    memo[colmask] = acc;
    return acc;
}

RamifiedElem det(const BMatrix& A) {
    if (A.rows != A.cols)
        throw config_error("det: not square");
    if (A.rows == 0) return RamifiedElem::one(A.K, A.delta);
    if (A.rows > 16)
        throw capability_error("det: rank too large");
    std::vector<RamifiedElem> memo(1u << A.rows, RamifiedElem::zero(A.K, A.delta));
    std::vector<char> have(1u << A.rows, 0);
    return det_rec(A, 0, (1u << A.rows) - 1, memo, have);
}

BMatrix reduce_precision(const BMatrix& A, int new_K) {
    BMatrix C = A;
    C.K = new_K;
    C.delta = A.delta & precision_mask(new_K);
    for (auto& x : C.e) x = reduce_precision(x, new_K);
    return C;
}

BMatrix gram_transform(const BMatrix& G, const BMatrix& U) {
    return mul(conj_transpose(U), mul(G, U));
}

} // namespace hermdens
