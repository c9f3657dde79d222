#include "hermdens/ramified.hpp"

#include <algorithm>

namespace hermdens {

uint32_t precision_mask(int K) {
    return (K >= 32) ? 0xffffffffu : ((1u << K) - 1u);
}

static void check_compatible(const RamifiedElem& x, const RamifiedElem& y, const char* who) {
    if (x.K != y.K)
        throw config_error(std::string(who) + ": mixed precision " + std::to_string(x.K) +
                           " vs " + std::to_string(y.K));
    if (x.delta != y.delta)
        throw config_error(std::string(who) + ": mixed delta");
}

RamifiedElem RamifiedElem::make(uint32_t a, uint32_t b, int K, uint32_t delta) {
    if (K < 1 || K > 31)
        throw config_error("RamifiedElem::make: precision out of range");
    if ((delta & 1u) == 0)
        throw config_error("RamifiedElem::make: delta must be odd");
    uint32_t m = precision_mask(K);
    return RamifiedElem{a & m, b & m, K, delta & m};
}

RamifiedElem RamifiedElem::from_int(int64_t v, int K, uint32_t delta) {
    uint64_t span = 1ull << K;
    uint64_t r = ((v % (int64_t)span) + (int64_t)span) % (int64_t)span;
    return make((uint32_t)r, 0, K, delta);
}

std::string RamifiedElem::str() const {
    return std::to_string(a) + "+" + std::to_string(b) + "pi";
}

int v2_residue(uint32_t x, int K) {
    if ((x & precision_mask(K)) == 0) return K;
    int v = 0;
    while (((x >> v) & 1u) == 0) ++v;
    return v;
}

RamifiedElem add(const RamifiedElem& x, const RamifiedElem& y) {
    check_compatible(x, y, "add");
    uint32_t m = precision_mask(x.K);
    return RamifiedElem{(x.a + y.a) & m, (x.b + y.b) & m, x.K, x.delta};
}

RamifiedElem sub(const RamifiedElem& x, const RamifiedElem& y) {
    check_compatible(x, y, "sub");
    uint32_t m = precision_mask(x.K);
    return RamifiedElem{(x.a - y.a) & m, (x.b - y.b) & m, x.K, x.delta};
}

RamifiedElem mul(const RamifiedElem& x, const RamifiedElem& y) {
    check_compatible(x, y, "mul");
    uint32_t m = precision_mask(x.K);
    // (a1 + b1 pi)(a2 + b2 pi) = a1 a2 + 2 delta b1 b2 + (a1 b2 + b1 a2) pi
    uint32_t bb = (uint32_t)((uint64_t)x.b * y.b);
    uint32_t a = (uint32_t)((uint64_t)x.a * y.a + (uint64_t)(2u * x.delta) * bb);
    uint32_t b = (uint32_t)((uint64_t)x.a * y.b + (uint64_t)x.b * y.a);
    return RamifiedElem{a & m, b & m, x.K, x.delta};
}

RamifiedElem neg(const RamifiedElem& x) {
    uint32_t m = precision_mask(x.K);
    return RamifiedElem{(0u - x.a) & m, (0u - x.b) & m, x.K, x.delta};
}

RamifiedElem conj(const RamifiedElem& x) {
    uint32_t m = precision_mask(x.K);
    return RamifiedElem{x.a, (0u - x.b) & m, x.K, x.delta};
}

int pi_valuation(const RamifiedElem& x) {
    if (x.is_zero()) return kValInfinite;
    int va = (x.a == 0) ? kValInfinite : 2 * v2_residue(x.a, x.K);
    int vb = (x.b == 0) ? kValInfinite : 2 * v2_residue(x.b, x.K) + 1;
    return std::min(va, vb);
}

uint32_t norm_residue(const RamifiedElem& x) {
    uint32_t m = precision_mask(x.K);
    uint32_t bb = (uint32_t)((uint64_t)x.b * x.b);
    uint32_t n = (uint32_t)((uint64_t)x.a * x.a - (uint64_t)(2u * x.delta) * bb);
    return n & m;
}

uint32_t trace_residue(const RamifiedElem& x) {
    return (2u * x.a) & precision_mask(x.K);
}

uint32_t inv_odd(uint32_t u, int K) {
    if ((u & 1u) == 0)
        throw std::domain_error("inv_odd: even argument");
    uint32_t y = u; // u*u = 1 mod 8, so y is correct to 3 digits
    for (int i = 0; i < 5; ++i)
        y = y * (2u - u * y);
    return y & precision_mask(K);
}

RamifiedElem invert_unit(const RamifiedElem& x) {
    if (!x.is_unit())
        throw std::domain_error("invert_unit: not a unit");
    // x^-1 = conj(x) / N(x), and N(x) is an odd integer here.
    uint32_t ninv = inv_odd(norm_residue(x), x.K);
    RamifiedElem c = conj(x);
    uint32_t m = precision_mask(x.K);
    return RamifiedElem{(c.a * ninv) & m, (c.b * ninv) & m, x.K, x.delta};
}

// one pi factor off: (a + b pi)/pi = b + (a / (2 delta)) pi
static RamifiedElem peel_pi(const RamifiedElem& x) {
    if ((x.a & 1u) != 0)
        throw std::domain_error("divide_exact: not divisible");
    uint32_t m = precision_mask(x.K);
    uint32_t half = (x.a >> 1) & m;
    uint32_t bnew = (half * inv_odd(x.delta, x.K)) & m;
    return RamifiedElem{x.b, bnew, x.K, x.delta};
}

RamifiedElem divide_exact(const RamifiedElem& x, const RamifiedElem& y) {
    check_compatible(x, y, "divide_exact");
    int w = pi_valuation(y);
    if (w == kValInfinite)
        throw std::domain_error("divide_exact: divisor is zero at this precision");
    if (w >= 2 * y.K - kValGuard)
        throw precision_error("divide_exact: divisor valuation exhausts precision");
    if (pi_valuation(x) < w)
        throw std::domain_error("divide_exact: not divisible");
    RamifiedElem xs = x, ys = y;
    for (int i = 0; i < w; ++i) {
        xs = peel_pi(xs);
        ys = peel_pi(ys);
    }
    RamifiedElem r = mul(xs, invert_unit(ys));
    int lost = (w + 1) / 2;
    if (r.K - lost < 1)
        throw precision_error("divide_exact: no digits left after division");
    return reduce_precision(r, r.K - lost);
}

RamifiedElem reduce_precision(const RamifiedElem& x, int new_K) {
    if (new_K < 1 || new_K > x.K)
        throw config_error("reduce_precision: bad target precision");
    uint32_t m = precision_mask(new_K);
    return RamifiedElem{x.a & m, x.b & m, new_K, x.delta & m};
}

uint32_t sqrt_odd(uint32_t c, int K) {
    if ((c & 7u) != 1u)
        throw std::domain_error("sqrt_odd: argument not 1 mod 8");
    uint32_t t = 1;
    for (int j = 3; j < K; ++j) {
        if (((t * t - c) >> j) & 1u)
            t += 1u << (j - 1);
    }
    return t & precision_mask(K);
}

uint32_t unit_class_rep_mod8(uint32_t u, uint32_t delta) {
    uint32_t r1 = u & 7u;
    uint32_t r2 = (u * (1u - 2u * delta)) & 7u;
    return std::min(r1, r2);
}

RamifiedElem norm_preimage(uint32_t c, int K, uint32_t delta) {
    uint32_t m = precision_mask(K);
    c &= m;
    if ((c & 7u) == 1u) {
        return RamifiedElem::make(sqrt_odd(c, K), 0, K, delta);
    }
    uint32_t other = (1u - 2u * delta) & 7u;
    if ((c & 7u) == other) {
        // N(t0 (1+pi)) = t0^2 (1 - 2 delta)
        uint32_t t0 = sqrt_odd((c * inv_odd((1u - 2u * delta) & m, K)) & m, K);
        return RamifiedElem::make(t0, t0, K, delta);
    }
    throw std::domain_error("norm_preimage: residue is not a norm");
}

} // namespace hermdens
