#include "hermdens/io.hpp"

#include "hermdens/errors.hpp"

namespace hermdens {

namespace {

uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4b08dull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

JordanComponent comp(int scale, int hyp, TailKind tail, int64_t param = 0) {
    JordanComponent c;
    c.scale = scale;
    c.hyperbolic_count = hyp;
    c.tail = tail;
    switch (tail) {
        case TailKind::unit: c.unit_a = (uint32_t)param; break;
        case TailKind::A_1_2b_1:
        case TailKind::A_2delta_2b_1: c.b_param = param; break;
        case TailKind::A_4a_2delta_pi: c.a_param = param; break;
        case TailKind::none: break;
    }
    c.rank = 2 * hyp + c.tail_rank();
    return c;
}

/* One random component at the given scale, spending at most `budget` rank.
 * Even scales may carry any even-scale tail, odd scales the free pair or
 * nothing but hyperbolic planes. */
JordanComponent random_component(uint64_t& rng, int scale, int budget) {
    const bool even = ((scale % 2) + 2) % 2 == 0;
    for (;;) {
        const uint64_t r = splitmix64(rng);
        const int pick = (int)(r % 5);
        if (even) {
            if (pick == 0) return comp(scale, 0, TailKind::unit, 1 + 2 * (int)((r >> 8) % 4));
            if (pick == 1 && budget >= 2) return comp(scale, 0, TailKind::A_1_2b_1, (int)((r >> 8) % 2));
            if (pick == 2 && budget >= 2) return comp(scale, 0, TailKind::A_2delta_2b_1, 1);
            if (pick == 3 && budget >= 2) return comp(scale, 1, TailKind::none);
            if (pick == 4 && budget >= 3) return comp(scale, 1, TailKind::unit, 1 + 2 * (int)((r >> 8) % 4));
        } else {
            if (pick < 2 && budget >= 2) return comp(scale, 0, TailKind::A_4a_2delta_pi, (int)((r >> 8) % 2));
            if (pick >= 2 && budget >= 2) return comp(scale, 1, TailKind::none);
        }
    }
}

} // namespace

std::vector<LatticeFile> corpus_generate(uint64_t seed, int count, int max_rank, int max_scale) {
    if (count < 0) count = 0;
    if (max_rank < 1) max_rank = 1;
    if (max_scale < 0) max_scale = 0;

    /* Fixed openers guarantee every tail kind appears once the count allows,
     * independent of the seed; the caps only clamp their scales. */
    std::vector<std::vector<JordanComponent>> shapes;
    const int odd_scale = max_scale >= 1 ? 1 : -1;
    const int even_high = max_scale >= 2 ? 2 : 0;
    shapes.push_back({comp(0, 0, TailKind::unit, 1)});
    if (max_rank >= 2) {
        shapes.push_back({comp(0, 0, TailKind::A_1_2b_1, 1)});
        shapes.push_back({comp(0, 0, TailKind::A_2delta_2b_1, 1)});
        shapes.push_back({comp(0, 1, TailKind::none)});
        if (odd_scale > 0) {
            shapes.push_back({comp(odd_scale, 0, TailKind::A_4a_2delta_pi, 1)});
            shapes.push_back({comp(odd_scale, 1, TailKind::none)});
        }
    }
    shapes.push_back({comp(even_high, 0, TailKind::unit, 3)});
    if (max_rank >= 2) {
        shapes.push_back({comp(0, 0, TailKind::A_1_2b_1, 0)});
        if (odd_scale > 0)
            shapes.push_back({comp(odd_scale, 0, TailKind::A_4a_2delta_pi, 0)});
    }
    if (max_rank >= 3 && odd_scale > 0)
        shapes.push_back({comp(0, 0, TailKind::unit, 1), comp(1, 1, TailKind::none)});
    shapes.push_back({comp(0, 0, TailKind::unit, 7)});
    if (max_rank >= 2 && even_high > 0)
        shapes.push_back({comp(even_high, 1, TailKind::none)});

    uint64_t rng = seed ? seed : 0x9e3779b97f4a7c15ull;
    while ((int)shapes.size() < count) {
        std::vector<JordanComponent> comps;
        int budget = 1 + (int)(splitmix64(rng) % (uint64_t)max_rank);
        int scale = (int)(splitmix64(rng) % (uint64_t)(max_scale + 1));
        while (budget > 0 && scale <= max_scale) {
            const bool odd = ((scale % 2) + 2) % 2 == 1;
            if (odd && budget < 2) break;
            JordanComponent c = random_component(rng, scale, budget);
            comps.push_back(c);
            budget -= c.rank;
            scale += 1 + (int)(splitmix64(rng) % 2);
        }
        if (comps.empty()) continue;
        shapes.push_back(std::move(comps));
    }
    shapes.resize(count);

    std::vector<LatticeFile> out;
    out.reserve(shapes.size());
    for (size_t i = 0; i < shapes.size(); ++i) {
        LatticeFile lf;
        lf.delta = (i % 2 == 0) ? 1 : 3;
        lf.precision_bits = kDefaultPrecision;
        BMatrix nf = assemble_normal_form(shapes[i], lf.precision_bits, lf.delta);
        if ((i / 2) % 2 == 1) {
            const uint64_t conj_seed = splitmix64(rng) | 1ull;
            lf.gram = random_isometry_conjugate(HermitianGram::from_matrix(nf), conj_seed).m;
        } else {
            lf.gram = nf;
        }
        out.push_back(std::move(lf));
    }
    return out;
}

} // namespace hermdens
