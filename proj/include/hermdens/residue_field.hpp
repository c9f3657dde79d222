#pragma once

#include <cstdint>

#include "hermdens/errors.hpp"

namespace hermdens {

/* F_{2^d} as polynomials over F_2 modulo a fixed irreducible of degree d.
 * Elements are bit patterns (bit i = coefficient of x^i), always reduced.
 * Each degree uses one fixed modulus so serialized elements mean the same
 * thing everywhere. */
class ResidueField {
public:
    explicit ResidueField(int degree);

    int degree() const { return d_; }
    uint32_t order() const { return 1u << d_; }
    uint32_t modulus() const { return mod_; }

    bool valid(uint32_t x) const { return x < order(); }

    uint32_t add(uint32_t x, uint32_t y) const { return x ^ y; }
    uint32_t mul(uint32_t x, uint32_t y) const;
    uint32_t frobenius(uint32_t x) const { return mul(x, x); }

    // absolute trace down to F_2, returned as 0 or 1
    int trace(uint32_t x) const;

private:
    int d_;
    uint32_t mod_;
};

/* z^2 + z = bbar has a solution in the field iff the absolute trace of bbar
 * vanishes. */
bool artin_schreier_solvable(const ResidueField& k, uint32_t bbar);

} // namespace hermdens
