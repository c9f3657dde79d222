#pragma once

#include <cstdint>
#include <string>

#include "hermdens/errors.hpp"

namespace hermdens {

/* Arithmetic in B = Z_2[pi] with pi^2 = 2*delta, delta odd, truncated to
 * K 2-adic digits per coordinate.  The conjugation sends pi to -pi, so the
 * fixed ring is Z_2 and N(x) = x*conj(x) lands there.
 *
 * An element is a + b*pi with both residues stored mod 2^K.  The pi-adic
 * valuation of a nonzero element is min(2*v2(a), 2*v2(b)+1); with truncated
 * coordinates any computed valuation of 2K - 6 or more should be treated as
 * "precision exhausted" by callers (guard band of 6 digits).
 */

inline constexpr int kValInfinite = 1 << 30;
inline constexpr int kValGuard = 6;
inline constexpr int kDefaultPrecision = 16;

struct RamifiedElem {
    uint32_t a = 0;      // coordinate of 1
    uint32_t b = 0;      // coordinate of pi
    int K = kDefaultPrecision;
    uint32_t delta = 1;  // odd; pi^2 = 2*delta

    static RamifiedElem make(uint32_t a, uint32_t b, int K, uint32_t delta);
    static RamifiedElem from_int(int64_t v, int K, uint32_t delta);
    static RamifiedElem zero(int K, uint32_t delta) { return make(0, 0, K, delta); }
    static RamifiedElem one(int K, uint32_t delta) { return make(1, 0, K, delta); }
    static RamifiedElem pi(int K, uint32_t delta) { return make(0, 1, K, delta); }

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_unit() const { return (a & 1u) != 0; }

    bool operator==(const RamifiedElem& o) const = default;

    std::string str() const;
};

uint32_t precision_mask(int K);

// v2 of a residue known mod 2^K; returns K for the zero residue.
int v2_residue(uint32_t x, int K);

RamifiedElem add(const RamifiedElem& x, const RamifiedElem& y);
RamifiedElem sub(const RamifiedElem& x, const RamifiedElem& y);
RamifiedElem mul(const RamifiedElem& x, const RamifiedElem& y);
RamifiedElem neg(const RamifiedElem& x);
RamifiedElem conj(const RamifiedElem& x);

inline RamifiedElem operator+(const RamifiedElem& x, const RamifiedElem& y) { return add(x, y); }
inline RamifiedElem operator-(const RamifiedElem& x, const RamifiedElem& y) { return sub(x, y); }
inline RamifiedElem operator*(const RamifiedElem& x, const RamifiedElem& y) { return mul(x, y); }
inline RamifiedElem operator-(const RamifiedElem& x) { return neg(x); }

/* pi-adic valuation from the stored residues.  kValInfinite when both
 * coordinates vanish mod 2^K. */
int pi_valuation(const RamifiedElem& x);

// N(x) = a^2 - 2*delta*b^2 mod 2^K, the norm down to Z_2.
uint32_t norm_residue(const RamifiedElem& x);

// trace 2a mod 2^K
uint32_t trace_residue(const RamifiedElem& x);

/* Inverse of a unit (valuation 0); throws std::domain_error otherwise. */
RamifiedElem invert_unit(const RamifiedElem& x);

/* Exact division x / y.  Requires pi_valuation(x) >= pi_valuation(y), which
 * over this ring is the same as divisibility; throws std::domain_error when
 * that fails or y is zero mod 2^K.  The result satisfies result * y == x on
 * the surviving digits and carries K reduced by ceil(v(y)/2), the digits
 * burned by peeling pi factors off both operands. */
RamifiedElem divide_exact(const RamifiedElem& x, const RamifiedElem& y);

// Forget low coordinates: re-truncate to new_K <= K digits.
RamifiedElem reduce_precision(const RamifiedElem& x, int new_K);

/* --- plain 2-adic helpers on residues mod 2^K (used by the lattice
 *     normalizers; kept here so all Hensel-style code lives in one place) --- */

// inverse of an odd residue mod 2^K
uint32_t inv_odd(uint32_t u, int K);

/* square root of c mod 2^K for c = 1 mod 8 (digit-by-digit lift; the
 * returned root is the one that is 1 mod 4). */
uint32_t sqrt_odd(uint32_t c, int K);

/* Smallest-representative orbit data for the unit class u * {1, 1-2*delta}
 * mod 8: returns the smaller of the two odd orbit representatives. */
uint32_t unit_class_rep_mod8(uint32_t u, uint32_t delta);

/* Element t of B with N(t) = c exactly, for c a unit whose residue mod 8
 * lies in {1, 1-2*delta} (the norm classes).  Throws std::domain_error for
 * other residues. */
RamifiedElem norm_preimage(uint32_t c, int K, uint32_t delta);

} // namespace hermdens
