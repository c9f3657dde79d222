#include "hermdens/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "hermdens/errors.hpp"

namespace hermdens {

namespace {

using nlohmann::json;

const char* tail_token(TailKind t) {
    switch (t) {
        case TailKind::none: return "none";
        case TailKind::unit: return "unit";
        case TailKind::A_1_2b_1: return "A_1_2b_1";
        case TailKind::A_2delta_2b_1: return "A_2delta_2b_1";
        case TailKind::A_4a_2delta_pi: return "A_4a_2delta_pi";
    }
    return "none";
}

TailKind tail_from_token(const std::string& s) {
    if (s == "none") return TailKind::none;
    if (s == "unit") return TailKind::unit;
    if (s == "A_1_2b_1") return TailKind::A_1_2b_1;
    if (s == "A_2delta_2b_1") return TailKind::A_2delta_2b_1;
    if (s == "A_4a_2delta_pi") return TailKind::A_4a_2delta_pi;
    throw std::invalid_argument("lattice file: unknown tail kind \"" + s + "\"");
}

[[noreturn]] void bad(const std::string& what) {
    throw std::invalid_argument("lattice file: " + what);
}

json component_to_json(const JordanComponent& c) {
    json params = json::object();
    switch (c.tail) {
        case TailKind::unit: params["unit_a"] = c.unit_a; break;
        case TailKind::A_1_2b_1:
        case TailKind::A_2delta_2b_1: params["b"] = c.b_param; break;
        case TailKind::A_4a_2delta_pi: params["a"] = c.a_param; break;
        case TailKind::none: break;
    }
    return json{{"scale", c.scale},
                {"rank", c.rank},
                {"tail", tail_token(c.tail)},
                {"params", params}};
}

JordanComponent component_from_json(const json& j) {
    if (!j.is_object()) bad("profile component is not an object");
    JordanComponent c;
    c.scale = j.at("scale").get<int>();
    c.rank = j.at("rank").get<int>();
    c.tail = tail_from_token(j.at("tail").get<std::string>());
    const json params = j.value("params", json::object());
    switch (c.tail) {
        case TailKind::unit: c.unit_a = params.at("unit_a").get<uint32_t>(); break;
        case TailKind::A_1_2b_1:
        case TailKind::A_2delta_2b_1: c.b_param = params.at("b").get<int64_t>(); break;
        case TailKind::A_4a_2delta_pi: c.a_param = params.at("a").get<int64_t>(); break;
        case TailKind::none: break;
    }
    if (c.rank < c.tail_rank() || (c.rank - c.tail_rank()) % 2 != 0)
        bad("component rank does not fit the declared tail");
    c.hyperbolic_count = (c.rank - c.tail_rank()) / 2;
    return c;
}

std::string scaled_name(const JordanComponent& c) {
    std::string s = tail_kind_name(c.tail);
    if (c.tail == TailKind::unit) s = "(" + std::to_string(c.unit_a) + ")";
    if (c.hyperbolic_count > 0) {
        std::string h = std::to_string(c.hyperbolic_count) + "xH";
        s = (c.tail == TailKind::none) ? h : h + " + " + s;
    }
    return s;
}

} // namespace

LatticeFile lattice_from_json(const json& j) {
    if (!j.is_object()) bad("top level is not an object");
    LatticeFile lf;
    lf.format_version = j.value("format_version", 1);
    if (lf.format_version != 1) bad("unsupported format_version");
    lf.delta = j.value("delta", 1u);
    if (lf.delta % 2 == 0) bad("delta must be odd");
    lf.precision_bits = j.value("precision_bits", kDefaultPrecision);
    if (lf.precision_bits < 4 || lf.precision_bits > 31) bad("precision_bits out of range");

    const bool has_gram = j.contains("gram");
    const bool has_profile = j.contains("profile");
    if (has_gram == has_profile) bad("exactly one of gram/profile must be present");

    if (has_gram) {
        const json& g = j.at("gram");
        if (!g.is_array() || g.empty()) bad("gram is not a nonempty array");
        const int n = (int)g.size();
        BMatrix m = BMatrix::zeros(n, n, lf.precision_bits, lf.delta);
        for (int r = 0; r < n; ++r) {
            if (!g[r].is_array() || (int)g[r].size() != n) bad("gram is not square");
            for (int c = 0; c < n; ++c) {
                const json& e = g[r][c];
                if (!e.is_object() || !e.contains("a") || !e.contains("b"))
                    bad("gram entry is not an {a, b} pair");
                const int64_t a = e.at("a").get<int64_t>();
                const int64_t b = e.at("b").get<int64_t>();
                const uint32_t mask = precision_mask(lf.precision_bits);
                m.set(r, c, RamifiedElem::make((uint32_t)a & mask, (uint32_t)b & mask,
                                               lf.precision_bits, lf.delta));
            }
        }
        HermitianGram G = HermitianGram::from_matrix(m);
        GramDiagnostics diag = validate_gram(G);
        if (!diag.ok) {
            std::string msg = "gram rejected:";
            for (const auto& s : diag.issues) msg += " " + s + ";";
            bad(msg);
        }
        lf.gram = m;
    } else {
        const json& p = j.at("profile");
        if (!p.is_object()) bad("profile is not an object");
        lf.f_degree = p.value("f", 1);
        if (lf.f_degree < 1 || lf.f_degree > 20) bad("profile f out of range");
        const json& comps = p.at("components");
        if (!comps.is_array()) bad("profile components is not an array");
        int prev_scale = INT32_MIN;
        for (const json& cj : comps) {
            JordanComponent c = component_from_json(cj);
            if (c.scale <= prev_scale) bad("profile scales must strictly increase");
            prev_scale = c.scale;
            lf.profile.push_back(c);
        }
        if (p.contains("bbar_overrides")) {
            for (const auto& [key, value] : p.at("bbar_overrides").items())
                lf.bbar_overrides[std::stoi(key)] = value.get<uint32_t>();
        }
    }
    return lf;
}

json lattice_to_json(const LatticeFile& lf) {
    json j;
    j["format_version"] = lf.format_version;
    j["delta"] = lf.delta;
    j["precision_bits"] = lf.precision_bits;
    if (lf.has_gram()) {
        const BMatrix& m = *lf.gram;
        json rows = json::array();
        for (int r = 0; r < m.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < m.cols; ++c)
                row.push_back(json{{"a", m.at(r, c).a}, {"b", m.at(r, c).b}});
            rows.push_back(std::move(row));
        }
        j["gram"] = std::move(rows);
    } else {
        json comps = json::array();
        for (const auto& c : lf.profile) comps.push_back(component_to_json(c));
        json p = json{{"f", lf.f_degree}, {"components", std::move(comps)}};
        if (!lf.bbar_overrides.empty()) {
            json ov = json::object();
            for (const auto& [scale, bbar] : lf.bbar_overrides)
                ov[std::to_string(scale)] = bbar;
            p["bbar_overrides"] = std::move(ov);
        }
        j["profile"] = std::move(p);
    }
    return j;
}

LatticeFile load_lattice(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open lattice file " + path);
    json j;
    in >> j;
    return lattice_from_json(j);
}

void save_lattice(const LatticeFile& lf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write lattice file " + path);
    out << lattice_to_json(lf).dump(2) << "\n";
}

JordanDecomposition decomposition_of(const LatticeFile& lf) {
    if (lf.has_gram())
        return jordan_split(HermitianGram::from_matrix(*lf.gram));
    if (lf.f_degree != 1)
        throw capability_error(
            "decomposition_of: profile declares residue degree " +
            std::to_string(lf.f_degree) + "; gram-level work needs degree 1");
    JordanDecomposition d;
    d.comps = lf.profile;
    d.K = lf.precision_bits;
    d.delta = lf.delta;
    d.normal_form = assemble_normal_form(d.comps, d.K, d.delta);
    d.U = BMatrix::identity(d.normal_form.rows, d.K, d.delta);
    return d;
}

TypeProfile profile_of(const LatticeFile& lf) {
    TypeProfile p;
    if (lf.has_gram()) {
        p = classify(jordan_split(HermitianGram::from_matrix(*lf.gram)));
    } else {
        p = classify_components(lf.profile, lf.f_degree);
        for (const auto& [scale, bbar] : lf.bbar_overrides) {
            bool found = false;
            for (auto& st : p.scales)
                if (st.scale == scale) {
                    st.bbar = bbar;
                    found = true;
                }
            if (!found)
                throw std::invalid_argument(
                    "lattice file: bbar override names absent scale " + std::to_string(scale));
        }
    }
    return p;
}

json decomposition_to_json(const JordanDecomposition& dec) {
    json comps = json::array();
    for (const auto& c : dec.comps) comps.push_back(component_to_json(c));
    return json{{"delta", dec.delta},
                {"precision_bits", dec.K},
                {"components", std::move(comps)}};
}

json profile_to_json(const TypeProfile& p) {
    json scales = json::array();
    for (const auto& st : p.scales) {
        scales.push_back(json{{"scale", st.scale},
                              {"rank", st.rank},
                              {"type", type_tag_name(st.tag)},
                              {"bound", st.bound},
                              {"bbar", st.bbar},
                              {"tail", tail_token(st.tail)}});
    }
    return json{{"n", p.n}, {"f", p.f_degree}, {"scales", std::move(scales)}};
}

json density_report_to_json(const DensityReport& r) {
    json factors = json::array();
    for (size_t i = 0; i < r.factors.size(); ++i) {
        factors.push_back(json{{"name", r.factors[i].name()},
                               {"dim", r.factors[i].dim},
                               {"scale", r.factors[i].source_scale},
                               {"order", r.factor_orders[i].get_str()}});
    }
    return json{{"n", r.n},
                {"f", r.f_degree},
                {"N_M", r.N_M},
                {"N_H", r.N_H},
                {"N", r.N},
                {"a_count", r.a_count},
                {"beta", r.beta},
                {"dim_G1", r.dim_G1},
                {"l_unipotent", r.l_unipotent},
                {"l_prime", r.l_prime},
                {"factors", std::move(factors)},
                {"fiber_count", r.fiber_count.get_str()},
                {"beta_L", r.beta_L.get_str()}};
}

json sublattice_dims_to_json(const std::vector<SublatticeDims>& dims) {
    json rows = json::array();
    for (const auto& d : dims) {
        json row = json{{"scale", d.scale},
                        {"rank", d.rank},
                        {"dim_A_mod_B", d.dim_A_mod_B},
                        {"dim_W_mod_X", d.dim_W_mod_X}};
        if (d.dim_B_mod_Z >= 0) row["dim_B_mod_Z"] = d.dim_B_mod_Z;
        if (d.dim_B_mod_Y >= 0) row["dim_B_mod_Y"] = d.dim_B_mod_Y;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string decomposition_to_text(const JordanDecomposition& dec) {
    std::ostringstream out;
    out << "jordan splitting, delta = " << dec.delta << "\n";
    out << "  scale  rank  block\n";
    for (const auto& c : dec.comps) {
        out << "  " << std::setw(5) << c.scale << "  " << std::setw(4) << c.rank
            << "  " << scaled_name(c) << "\n";
    }
    if (dec.comps.empty()) out << "  (zero lattice)\n";
    return out.str();
}

std::string profile_to_text(const TypeProfile& p) {
    std::ostringstream out;
    out << "type profile: n = " << p.n << ", residue field F_" << (1u << p.f_degree) << "\n";
    out << "  scale  rank  type         bound\n";
    for (const auto& st : p.scales) {
        out << "  " << std::setw(5) << st.scale << "  " << std::setw(4) << st.rank << "  "
            << std::setw(11) << std::left << type_tag_name(st.tag) << std::right << "  "
            << (st.bound ? "yes" : "no") << "\n";
    }
    if (p.scales.empty()) out << "  (zero lattice)\n";
    return out.str();
}

std::string density_report_to_text(const DensityReport& r) {
    std::ostringstream out;
    out << "density report, n = " << r.n << ", residue field F_" << (1u << r.f_degree) << "\n";
    out << "  exponents: N_M = " << r.N_M << ", N_H = " << r.N_H << ", N = " << r.N
        << ", a = " << r.a_count << "\n";
    out << "  fiber: dim = " << r.dim_G1 << ", unipotent l = " << r.l_unipotent
        << ", l' = " << r.l_prime << ", component exponent beta = " << r.beta << "\n";
    out << "  reductive factors:";
    if (r.factors.empty()) out << " (none)";
    for (size_t i = 0; i < r.factors.size(); ++i)
        out << " " << r.factors[i].name() << " of order " << r.factor_orders[i].get_str();
    out << "\n";
    out << "  fiber points = " << r.fiber_count.get_str() << "\n";
    out << "  local density beta_L = " << r.beta_L.get_str() << "\n";
    return out.str();
}

std::string sublattice_dims_to_text(const std::vector<SublatticeDims>& dims) {
    std::ostringstream out;
    out << "invariant sublattice dimensions\n";
    out << "  scale  rank  A/B  W/X  B/Z  B/Y\n";
    for (const auto& d : dims) {
        auto cell = [](int v) { return v < 0 ? std::string("  -") : std::string("  ") + std::to_string(v); };
        out << "  " << std::setw(5) << d.scale << "  " << std::setw(4) << d.rank
            << " " << cell(d.dim_A_mod_B) << " " << cell(d.dim_W_mod_X)
            << " " << cell(d.dim_B_mod_Z) << " " << cell(d.dim_B_mod_Y) << "\n";
    }
    return out.str();
}

} // namespace hermdens
