#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hermdens/density.hpp"
#include "hermdens/gram.hpp"
#include "hermdens/jordan.hpp"
#include "hermdens/sublattices.hpp"

namespace hermdens {

/* On-disk description of one lattice: either an explicit Gram matrix or a
 * component profile (scale/rank/tail per block).  Profiles may carry a
 * residue degree f > 1 and per-scale bbar overrides; explicit grams are
 * always over Q_2 itself. */
struct LatticeFile {
    int format_version = 1;
    uint32_t delta = 1;
    int precision_bits = kDefaultPrecision;
    int f_degree = 1;
    std::optional<BMatrix> gram;
    std::vector<JordanComponent> profile;
    std::map<int, uint32_t> bbar_overrides;

    bool has_gram() const { return gram.has_value(); }
};

LatticeFile lattice_from_json(const nlohmann::json& j);
nlohmann::json lattice_to_json(const LatticeFile& lf);
LatticeFile load_lattice(const std::string& path);
void save_lattice(const LatticeFile& lf, const std::string& path);

/* Resolve the file to a decomposition: split the gram, or assemble the
 * declared profile directly.  Profile inputs with f_degree > 1 are fine for
 * classification and density but not for gram-level work. */
JordanDecomposition decomposition_of(const LatticeFile& lf);
TypeProfile profile_of(const LatticeFile& lf);

nlohmann::json decomposition_to_json(const JordanDecomposition& dec);
nlohmann::json profile_to_json(const TypeProfile& p);
nlohmann::json density_report_to_json(const DensityReport& r);
nlohmann::json sublattice_dims_to_json(const std::vector<SublatticeDims>& dims);

std::string decomposition_to_text(const JordanDecomposition& dec);
std::string profile_to_text(const TypeProfile& p);
std::string density_report_to_text(const DensityReport& r);
std::string sublattice_dims_to_text(const std::vector<SublatticeDims>& dims);

/* Deterministic test corpus: profile-driven lattices covering every tail
 * kind (once count permits), alternating delta, half of them re-issued as
 * scrambled-basis gram files. */
std::vector<LatticeFile> corpus_generate(uint64_t seed, int count, int max_rank, int max_scale);

} // namespace hermdens
