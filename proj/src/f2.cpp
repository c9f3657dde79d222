#include "hermdens/f2.hpp"

#include <stdexcept>

namespace hermdens {

void F2System::add_row(uint64_t coeffs, int rhs) {
    if (width < 0 || width > 63) throw std::domain_error("F2System: width out of range");
    uint64_t mask = width == 0 ? 0 : ((width == 63 ? ~0ull >> 1 : (1ull << width) - 1));
    uint64_t r = coeffs & mask;
    if (rhs & 1) r |= 1ull << width;
    rows.push_back(r);
}

F2Solution f2_solve(const F2System& sys) {
    std::vector<uint64_t> rows = sys.rows;
    int w = sys.width;
    std::vector<int> pivot_of_col(w, -1);
    size_t rank = 0;
    for (int col = 0; col < w && rank < rows.size(); ++col) {
        size_t p = rank;
        while (p < rows.size() && !((rows[p] >> col) & 1)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[rank], rows[p]);
        for (size_t r = 0; r < rows.size(); ++r)
            if (r != rank && ((rows[r] >> col) & 1)) rows[r] ^= rows[rank];
        pivot_of_col[col] = (int)rank;
        ++rank;
    }
    F2Solution sol;
    for (size_t r = rank; r < rows.size(); ++r)
        if (rows[r] >> w) return sol;  // 0 = 1 row
    sol.solvable = true;
    for (int col = 0; col < w; ++col)
        if (pivot_of_col[col] >= 0 && (rows[pivot_of_col[col]] >> w))
            sol.particular |= 1ull << col;
    for (int free_col = 0; free_col < w; ++free_col) {
        if (pivot_of_col[free_col] >= 0) continue;
        uint64_t v = 1ull << free_col;
        for (int col = 0; col < w; ++col)
            if (pivot_of_col[col] >= 0 && ((rows[pivot_of_col[col]] >> free_col) & 1))
                v |= 1ull << col;
        sol.nullspace.push_back(v);
    }
    return sol;
}

int f2_rank(std::vector<uint64_t> rows) {
    int rank = 0;
    for (int col = 0; col < 64 && rank < (int)rows.size(); ++col) {
        int p = rank;
        while (p < (int)rows.size() && !((rows[p] >> col) & 1)) ++p;
        if (p == (int)rows.size()) continue;
        std::swap(rows[rank], rows[p]);
        for (int r = 0; r < (int)rows.size(); ++r)
            if (r != rank && ((rows[r] >> col) & 1)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

std::vector<uint64_t> f2_kernel_basis(const std::vector<uint64_t>& rows, int width) {
    F2System sys(width);
    for (uint64_t r : rows) sys.add_row(r, 0);
    F2Solution sol = f2_solve(sys);
    return sol.nullspace;
}

} // namespace hermdens
