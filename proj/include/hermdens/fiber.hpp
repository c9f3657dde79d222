#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "hermdens/jordan.hpp"

namespace hermdens {

struct FiberLimits {
    uint64_t max_points = 1ull << 26;  // enumeration budget (raw candidates)
    int max_rank = 3;
};

struct FiberResult {
    mpz_class count;         // F_2 points of the special fiber group
    uint64_t enumerated = 0; // candidates actually tested
    bool partial = false;    // budget ran out before the space was covered
};

/* Count the F_2 points of the special fiber by exhausting the coordinate
 * space of the matrix model and testing membership (the moment matrix must
 * reproduce the normal form slot by slot at the required precision, and the
 * starred relation coordinates must resolve).  Only residue degree 1 and
 * total rank <= max_rank are supported; beyond that throws capability_error. */
FiberResult enumerate_fiber_points(const JordanDecomposition& dec, const FiberLimits& lim = {});

/* Count the points of the order-4 subgroup attached to a component-counting
 * scale j and verify exactly half of them carry the nontrivial class bit.
 * j must qualify (type I with the type II window around it); other j throw
 * std::domain_error.  Returns the point count (expected: 4). */
int check_fj_equations(const JordanDecomposition& dec, int j);

/* Multiply random pairs of enumerated points in the truncated model and
 * check every product lands back in the point set.  Throws
 * verification_error on a violation. */
void fiber_closure_check(const JordanDecomposition& dec, int pairs, uint64_t seed);

} // namespace hermdens
