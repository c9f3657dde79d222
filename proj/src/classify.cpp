#include "hermdens/classify.hpp"

#include <algorithm>

#include "hermdens/errors.hpp"

namespace hermdens {

std::string type_tag_name(TypeTag t) {
    switch (t) {
        case TypeTag::I_odd_rank: return "I odd-rank";
        case TypeTag::I_even_rank: return "I even-rank";
        case TypeTag::II_even: return "II";
        case TypeTag::I_odd_scale: return "I";
        case TypeTag::II_odd_scale: return "II";
    }
    return "?";
}

bool ScaleType::type_I() const {
    return tag == TypeTag::I_odd_rank || tag == TypeTag::I_even_rank || tag == TypeTag::I_odd_scale;
}

bool ScaleType::even_scale() const { return ((scale % 2) + 2) % 2 == 0; }

const ScaleType* TypeProfile::find(int scale) const {
    for (const auto& s : scales)
        if (s.scale == scale) return &s;
    return nullptr;
}

int TypeProfile::rank_at(int scale) const {
    const ScaleType* s = find(scale);
    return s ? s->rank : 0;
}

bool TypeProfile::effective_type_I(int scale) const {
    if (const ScaleType* s = find(scale)) return s->type_I();
    bool even = ((scale % 2) + 2) % 2 == 0;
    if (even) return false;
    const ScaleType* lo = find(scale - 1);
    const ScaleType* hi = find(scale + 1);
    return (lo && lo->type_I()) || (hi && hi->type_I());
}

int TypeProfile::min_scale() const {
    if (scales.empty()) return 0;
    return scales.front().scale;
}

int TypeProfile::max_scale() const {
    if (scales.empty()) return 0;
    return scales.back().scale;
}

TypeProfile classify_components(const std::vector<JordanComponent>& comps, int f_degree) {
    if (f_degree < 1) throw config_error("classify: residue degree must be positive");
    TypeProfile p;
    p.f_degree = f_degree;
    for (size_t i = 0; i < comps.size(); ++i) {
        if (i > 0 && comps[i].scale <= comps[i - 1].scale)
            throw config_error("classify: scales must strictly increase");
        if (comps[i].rank != 2 * comps[i].hyperbolic_count + comps[i].tail_rank())
            throw config_error("classify: component rank inconsistent with its tail");
        if (comps[i].rank <= 0) throw config_error("classify: empty component");
        p.n += comps[i].rank;
    }

    auto even_type_I_at = [&](int sc) {
        for (const auto& c : comps)
            if (c.scale == sc)
                return c.tail == TailKind::unit || c.tail == TailKind::A_1_2b_1;
        return false;
    };

    // first pass: types
    for (const auto& c : comps) {
        ScaleType s;
        s.scale = c.scale;
        s.rank = c.rank;
        s.tail = c.tail;
        s.hyperbolic_count = c.hyperbolic_count;
        s.bbar = c.bbar();
        s.gammabar = c.gammabar();
        s.unit_a = c.unit_a;
        bool even = ((c.scale % 2) + 2) % 2 == 0;
        if (even) {
            if (c.tail == TailKind::unit) s.tag = TypeTag::I_odd_rank;
            else if (c.tail == TailKind::A_1_2b_1) s.tag = TypeTag::I_even_rank;
            else s.tag = TypeTag::II_even;
            if (s.type_I() && (s.rank % 2 == 0) != (s.tag == TypeTag::I_even_rank))
                throw config_error("classify: rank parity clashes with the tail");
        } else {
            bool tI = c.tail == TailKind::A_4a_2delta_pi || even_type_I_at(c.scale - 1) ||
                      even_type_I_at(c.scale + 1);
            s.tag = tI ? TypeTag::I_odd_scale : TypeTag::II_odd_scale;
        }
        p.scales.push_back(s);
    }

    // second pass: bound flags (uses effective types, so gaps count per the
    // zero-lattice conventions)
    for (auto& s : p.scales) {
        if (s.even_scale()) {
            if (s.type_I())
                s.bound = p.effective_type_I(s.scale - 2) || p.effective_type_I(s.scale + 2);
            else
                s.bound = p.effective_type_I(s.scale - 1) || p.effective_type_I(s.scale + 1);
        } else {
            s.bound = p.effective_type_I(s.scale - 1) || p.effective_type_I(s.scale + 1);
        }
    }
    return p;
}

TypeProfile classify(const JordanDecomposition& dec) {
    return classify_components(dec.comps, 1);
}

} // namespace hermdens
