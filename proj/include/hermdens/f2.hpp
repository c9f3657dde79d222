#pragma once

#include <cstdint>
#include <vector>

namespace hermdens {

/* Small dense F2 linear algebra, enough for the residue computations.
 * Each row packs its coefficient bits in [0, width); affine systems put the
 * right-hand side in bit `width`.  width <= 63. */
struct F2System {
    int width = 0;
    std::vector<uint64_t> rows;

    explicit F2System(int w) : width(w) {}
    void add_row(uint64_t coeffs, int rhs);
};

struct F2Solution {
    bool solvable = false;
    uint64_t particular = 0;
    std::vector<uint64_t> nullspace;  // basis of the homogeneous part
};

F2Solution f2_solve(const F2System& sys);

int f2_rank(std::vector<uint64_t> rows);

/* Kernel of the map x -> (row_i . x)_i. */
std::vector<uint64_t> f2_kernel_basis(const std::vector<uint64_t>& rows, int width);

} // namespace hermdens
