#pragma once

#include <string>
#include <vector>

#include "hermdens/jordan.hpp"

namespace hermdens {

/* Per-scale type of a Jordan component.
 *
 * Even scale: type I when the norm equals the scale (a unit or A(1,2b,1)
 * tail), split by rank parity into I_odd_rank / I_even_rank; type II
 * otherwise.  Odd scale: type I when the dual-quotient jumps (tail
 * A(4a,2delta,pi), or forced by an adjacent even type I component). */
enum class TypeTag { I_odd_rank, I_even_rank, II_even, I_odd_scale, II_odd_scale };

std::string type_tag_name(TypeTag t);

struct ScaleType {
    int scale = 0;
    int rank = 0;
    TypeTag tag = TypeTag::II_even;
    bool bound = false;
    uint32_t bbar = 0;  // even type II splitness residue
    int gammabar = 0;
    uint32_t unit_a = 0;
    TailKind tail = TailKind::none;
    int hyperbolic_count = 0;

    bool type_I() const;
    bool even_scale() const;
};

struct TypeProfile {
    int n = 0;        // total rank
    int f_degree = 1; // residue field F_{2^f_degree}
    std::vector<ScaleType> scales;  // increasing scale, nonzero ranks only

    const ScaleType* find(int scale) const;
    int rank_at(int scale) const;

    /* Type of L_i including the zero-lattice conventions: an absent even
     * scale counts as type II, an absent odd scale as type I exactly when
     * one of its even neighbours is type I (bound, rank 0). */
    bool effective_type_I(int scale) const;

    int min_scale() const;
    int max_scale() const;
};

TypeProfile classify(const JordanDecomposition& dec);

/* Same, from bare component data (profile-driven inputs).  bbar of an even
 * type II component defaults to the component's own residue; callers with
 * symbolic residue fields may override it per scale. */
TypeProfile classify_components(const std::vector<JordanComponent>& comps, int f_degree);

} // namespace hermdens
