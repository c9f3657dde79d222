#include "hermdens/residue_field.hpp"

namespace hermdens {

// degree-indexed irreducibles, the usual trinomial/pentanomial picks
static const uint32_t kModuli[17] = {
    0,
    0x2,     // x
    0x7,     // x^2+x+1
    0xb,     // x^3+x+1
    0x13,    // x^4+x+1
    0x25,    // x^5+x^2+1
    0x43,    // x^6+x+1
    0x83,    // x^7+x+1
    0x11b,   // x^8+x^4+x^3+x+1
    0x211,   // x^9+x^4+1
    0x409,   // x^10+x^3+1
    0x805,   // x^11+x^2+1
    0x1053,  // x^12+x^6+x^4+x+1
    0x201b,  // x^13+x^4+x^3+x+1
    0x4443,  // x^14+x^10+x^6+x+1
    0x8003,  // x^15+x+1
    0x1100b, // x^16+x^12+x^3+x+1
};

ResidueField::ResidueField(int degree) : d_(degree) {
    if (degree < 1 || degree > 16)
        throw config_error("ResidueField: degree out of range [1,16]");
    mod_ = kModuli[degree];
}

uint32_t ResidueField::mul(uint32_t x, uint32_t y) const {
    if (!valid(x) || !valid(y))
        throw config_error("ResidueField::mul: element out of range");
    uint32_t acc = 0;
    while (y) {
        if (y & 1u) acc ^= x;
        y >>= 1;
        x <<= 1;
        if (x & (1u << d_)) x ^= mod_;
    }
    return acc;
}

int ResidueField::trace(uint32_t x) const {
    if (!valid(x))
        throw config_error("ResidueField::trace: element out of range");
    uint32_t acc = 0, p = x;
    for (int i = 0; i < d_; ++i) {
        acc ^= p;
        p = frobenius(p);
    }
    if (acc > 1)
        throw verification_error("ResidueField::trace: trace not in the prime field");
    return (int)acc;
}

bool artin_schreier_solvable(const ResidueField& k, uint32_t bbar) {
    return k.trace(bbar) == 0;
}

} // namespace hermdens
