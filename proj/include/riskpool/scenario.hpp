#pragma once

// Scenario files: the CLI's input format.
//
// A scenario is a JSON document describing a pool, a sharing-rule
// construction, the solver methods to run, and the reserve grid:
//
//   {
//     "name": "figure1_mp",
//     "eta": 0.4,
//     "participants": [
//       {"lambda": 2.0, "kappa": 0.0,
//        "severity": {"type": "exponential", "rate": 0.5}},
//       ...
//     ],
//     "matrix": {"rule": "mean_proportional"}
//             | {"rule": "uniform"}
//             | {"rule": "explicit", "rows": [[...], ...]}
//             | {"rule": "alternative",
//                "fixed": [{"row": 1, "col": 1, "value": 0.8}, ...]},
//     "methods": ["auto" | "closed" | "panjer" | "mc", ...],
//     "kappa_grid": {"min": 0.0, "max": 10.0, "steps": 51},
//     "panjer": {"span": 0, "tail_tol": 1e-10, "atom_cap": 2000000},
//     "mc": {"paths": 100000, "horizon_claims": 10000, "seed": 1,
//            "ceiling_multiple": 30, "exit_gap": 0, "exit_bias": 0},
//     "output": "figure1_mp.csv"
//   }
//
// Severity types: exponential{rate}, lognormal{mu, sigma2},
// gamma{shape, rate}, atoms{points: [[value, prob], ...]},
// scaled_mixture{components: [{weight, scale, severity}, ...]}.
// Matrix "fixed" entries are 1-based, matching the row/column numbering used
// everywhere in diagnostics.  Malformed input raises ScenarioError with the
// offending location; semantic violations surface as std::invalid_argument
// from the model constructors.
//
// scenario_to_json emits the normalized form — every default spelled out and
// the matrix resolved to explicit rows — which is a fixed point: parsing and
// re-emitting it reproduces the document byte for byte.

#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pool.hpp"
#include "ruin.hpp"

namespace riskpool {

class ScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct KappaGrid {
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 1;

    std::vector<double> points() const {
        detail::require(std::isfinite(min) && std::isfinite(max) && min >= 0.0 &&
                            max >= min,
                        "kappa grid: need 0 <= min <= max");
        detail::require(steps >= 1, "kappa grid: need at least one step");
        std::vector<double> out(steps);
        if (steps == 1) {
            out[0] = min;
            return out;
        }
        for (std::size_t i = 0; i < steps; ++i)
            out[i] = min + (max - min) * static_cast<double>(i) /
                               static_cast<double>(steps - 1);
        return out;
    }
};

enum class MatrixRuleKind { mean_proportional, uniform, explicit_entries, alternative };

struct MatrixRule {
    MatrixRuleKind kind = MatrixRuleKind::mean_proportional;
    std::vector<std::vector<double>> rows;  // explicit_entries
    std::vector<FixedEntry> fixed;          // alternative (0-based in memory)
};

struct Scenario {
    std::string name = "scenario";
    PoolSpec pool;
    MatrixRule matrix;
    std::vector<RuinMethod> methods{RuinMethod::auto_select};
    KappaGrid kappa_grid;
    PanjerOptions panjer{};
    McOptions mc{};
    std::string output;  // suggested CSV filename; empty -> derived from name
};

inline AllocationMatrix resolve_matrix(const PoolSpec& pool,
                                       const MatrixRule& rule) {
    switch (rule.kind) {
        case MatrixRuleKind::mean_proportional:
            return build_mean_proportional(pool);
        case MatrixRuleKind::uniform:
            return build_uniform(pool);
        case MatrixRuleKind::explicit_entries:
            return AllocationMatrix::from_rows(rule.rows);
        default:
            return complete_alternative(pool, rule.fixed);
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline const json& member(const json& j, const char* key,
                          const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ScenarioError(where + ": missing required key \"" + key + "\"");
    return *it;
}

inline double num(const json& j, const std::string& where) {
    if (!j.is_number())
        throw ScenarioError(where + ": expected a number");
    return j.get<double>();
}

inline double num_at(const json& j, const char* key, const std::string& where) {
    return num(member(j, key, where), where + "." + key);
}

inline double num_or(const json& j, const char* key, double fallback,
                     const std::string& where) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : num(*it, where + "." + key);
}

inline std::size_t index_or(const json& j, const char* key, std::size_t fallback,
                            const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_unsigned())
        throw ScenarioError(where + "." + key +
                            ": expected a non-negative integer");
    return it->get<std::size_t>();
}

inline std::string str_at(const json& j, const char* key,
                          const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_string())
        throw ScenarioError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline SeverityModel severity_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ScenarioError(where + ": expected an object");
    const std::string type = str_at(j, "type", where);
    if (type == "exponential")
        return SeverityModel::exponential(num_at(j, "rate", where));
    if (type == "lognormal")
        return SeverityModel::lognormal(num_at(j, "mu", where),
                                        num_at(j, "sigma2", where));
    if (type == "gamma")
        return SeverityModel::gamma(num_at(j, "shape", where),
                                    num_at(j, "rate", where));
    if (type == "atoms") {
        const json& pts = member(j, "points", where);
        if (!pts.is_array())
            throw ScenarioError(where + ".points: expected an array");
        std::vector<std::pair<double, double>> points;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const std::string pw =
                where + ".points[" + std::to_string(k) + "]";
            const json& p = pts[k];
            if (!p.is_array() || p.size() != 2)
                throw ScenarioError(pw + ": expected [value, probability]");
            points.emplace_back(num(p[0], pw), num(p[1], pw));
        }
        return SeverityModel::atoms(std::move(points));
    }
    if (type == "scaled_mixture") {
        const json& comps = member(j, "components", where);
        if (!comps.is_array() || comps.empty())
            throw ScenarioError(where +
                                ".components: expected a non-empty array");
        std::vector<MixtureInput> inputs;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const std::string cw =
                where + ".components[" + std::to_string(k) + "]";
            const json& c = comps[k];
            inputs.push_back({num_at(c, "weight", cw), num_at(c, "scale", cw),
                              severity_from_json(member(c, "severity", cw),
                                                 cw + ".severity")});
        }
        return SeverityModel::scaled_mixture(inputs);
    }
    throw ScenarioError(where + ": unknown severity type \"" + type + "\"");
}

inline json severity_to_json(const SeverityModel& m) {
    return std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return json{{"type", "exponential"}, {"rate", d.rate}};
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return json{{"type", "lognormal"}, {"mu", d.mu}, {"sigma2", d.sigma2}};
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                return json{{"type", "gamma"}, {"shape", d.shape}, {"rate", d.rate}};
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                json pts = json::array();
                for (const auto& [v, p] : d.points) pts.push_back(json::array({v, p}));
                return json{{"type", "atoms"}, {"points", std::move(pts)}};
            } else {
                json comps = json::array();
                for (const auto& c : d.components)
                    comps.push_back(json{{"weight", c.weight},
                                         {"scale", c.scale},
                                         {"severity", severity_to_json(*c.base)}});
                return json{{"type", "scaled_mixture"}, {"components", std::move(comps)}};
            }
        },
        m.dist());
}

inline RuinMethod method_from_string(const std::string& s,
                                     const std::string& where) {
    if (s == "auto") return RuinMethod::auto_select;
    if (s == "closed") return RuinMethod::closed_form;
    if (s == "panjer") return RuinMethod::panjer;
    if (s == "mc") return RuinMethod::monte_carlo;
    throw ScenarioError(where + ": unknown method \"" + s +
                        "\" (expected auto|closed|panjer|mc)");
}

inline const char* method_to_string(RuinMethod m) {
    switch (m) {
        case RuinMethod::closed_form: return "closed";
        case RuinMethod::panjer: return "panjer";
        case RuinMethod::monte_carlo: return "mc";
        default: return "auto";
    }
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
    using detail::json;
    if (!j.is_object())
        throw ScenarioError("scenario: top level must be an object");

    Scenario sc;
    if (j.contains("name")) sc.name = detail::str_at(j, "name", "scenario");

    sc.pool.eta = detail::num_at(j, "eta", "scenario");
    const json& parts = detail::member(j, "participants", "scenario");
    if (!parts.is_array() || parts.empty())
        throw ScenarioError("scenario.participants: expected a non-empty array");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string pw = "scenario.participants[" + std::to_string(i) + "]";
        const json& p = parts[i];
        Participant out;
        out.lambda = detail::num_at(p, "lambda", pw);
        out.kappa = detail::num_or(p, "kappa", 0.0, pw);
        out.severity = detail::severity_from_json(
            detail::member(p, "severity", pw), pw + ".severity");
        sc.pool.participants.push_back(std::move(out));
    }

    const json& mj = detail::member(j, "matrix", "scenario");
    const std::string rule = detail::str_at(mj, "rule", "scenario.matrix");
    if (rule == "mean_proportional") {
        sc.matrix.kind = MatrixRuleKind::mean_proportional;
    } else if (rule == "uniform") {
        sc.matrix.kind = MatrixRuleKind::uniform;
    } else if (rule == "explicit") {
        sc.matrix.kind = MatrixRuleKind::explicit_entries;
        const json& rows = detail::member(mj, "rows", "scenario.matrix");
        if (!rows.is_array())
            throw ScenarioError("scenario.matrix.rows: expected an array");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string rw =
                "scenario.matrix.rows[" + std::to_string(r) + "]";
            if (!rows[r].is_array()) throw ScenarioError(rw + ": expected an array");
            std::vector<double> row;
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                row.push_back(detail::num(rows[r][c], rw));
            sc.matrix.rows.push_back(std::move(row));
        }
    } else if (rule == "alternative") {
        sc.matrix.kind = MatrixRuleKind::alternative;
        const json& fixed = detail::member(mj, "fixed", "scenario.matrix");
        if (!fixed.is_array())
            throw ScenarioError("scenario.matrix.fixed: expected an array");
        for (std::size_t k = 0; k < fixed.size(); ++k) {
            const std::string fw =
                "scenario.matrix.fixed[" + std::to_string(k) + "]";
            const std::size_t row = detail::index_or(fixed[k], "row", 0, fw);
            const std::size_t col = detail::index_or(fixed[k], "col", 0, fw);
            if (row == 0 || col == 0)
                throw ScenarioError(fw + ": row/col are 1-based and required");
            sc.matrix.fixed.push_back(
                {row - 1, col - 1, detail::num_at(fixed[k], "value", fw)});
        }
    } else {
        throw ScenarioError("scenario.matrix.rule: unknown rule \"" + rule +
                            "\" (expected mean_proportional|uniform|explicit|"
                            "alternative)");
    }

    if (j.contains("methods")) {
        const json& ms = j["methods"];
        if (!ms.is_array() || ms.empty())
            throw ScenarioError("scenario.methods: expected a non-empty array");
        sc.methods.clear();
        for (std::size_t k = 0; k < ms.size(); ++k) {
            const std::string mw = "scenario.methods[" + std::to_string(k) + "]";
            if (!ms[k].is_string()) throw ScenarioError(mw + ": expected a string");
            sc.methods.push_back(
                detail::method_from_string(ms[k].get<std::string>(), mw));
        }
    }

    const json& kg = detail::member(j, "kappa_grid", "scenario");
    sc.kappa_grid.min = detail::num_or(kg, "min", 0.0, "scenario.kappa_grid");
    sc.kappa_grid.max = detail::num_at(kg, "max", "scenario.kappa_grid");
    sc.kappa_grid.steps =
        detail::index_or(kg, "steps", 1, "scenario.kappa_grid");
    if (sc.kappa_grid.steps == 0)
        throw ScenarioError("scenario.kappa_grid.steps: must be >= 1");

    if (j.contains("panjer")) {
        const json& pj = j["panjer"];
        sc.panjer.span = detail::num_or(pj, "span", 0.0, "scenario.panjer");
        sc.panjer.tail_tol =
            detail::num_or(pj, "tail_tol", 1e-10, "scenario.panjer");
        sc.panjer.atom_cap =
            detail::index_or(pj, "atom_cap", 2000000, "scenario.panjer");
    }
    if (j.contains("mc")) {
        const json& mc = j["mc"];
        sc.mc.paths = detail::index_or(mc, "paths", 100000, "scenario.mc");
        sc.mc.horizon_claims =
            detail::index_or(mc, "horizon_claims", 10000, "scenario.mc");
        sc.mc.seed = detail::index_or(mc, "seed", 1, "scenario.mc");
        sc.mc.ceiling_multiple =
            detail::num_or(mc, "ceiling_multiple", 30.0, "scenario.mc");
        sc.mc.exit_gap = detail::num_or(mc, "exit_gap", 0.0, "scenario.mc");
        sc.mc.exit_bias = detail::num_or(mc, "exit_bias", 0.0, "scenario.mc");
    }
    if (j.contains("output")) sc.output = detail::str_at(j, "output", "scenario");
    return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return parse_scenario(j);
}

// Normalized (canonical) form: defaults spelled out, matrix resolved to
// explicit rows.  Parsing the output and emitting it again is the identity.
inline nlohmann::json scenario_to_json(const Scenario& sc) {
    using detail::json;
    json participants = json::array();
    for (const auto& p : sc.pool.participants) {
        participants.push_back(json{{"lambda", p.lambda},
                                    {"kappa", p.kappa},
                                    {"severity", detail::severity_to_json(p.severity)}});
    }
    json rows = json::array();
    for (const auto& row : resolve_matrix(sc.pool, sc.matrix).rows())
        rows.push_back(row);
    json methods = json::array();
    for (RuinMethod m : sc.methods) methods.push_back(detail::method_to_string(m));
    return json{
        {"name", sc.name},
        {"eta", sc.pool.eta},
        {"participants", std::move(participants)},
        {"matrix", json{{"rule", "explicit"}, {"rows", std::move(rows)}}},
        {"methods", std::move(methods)},
        {"kappa_grid", json{{"min", sc.kappa_grid.min},
                            {"max", sc.kappa_grid.max},
                            {"steps", sc.kappa_grid.steps}}},
        {"panjer", json{{"span", sc.panjer.span},
                        {"tail_tol", sc.panjer.tail_tol},
                        {"atom_cap", sc.panjer.atom_cap}}},
        {"mc", json{{"paths", sc.mc.paths},
                    {"horizon_claims", sc.mc.horizon_claims},
                    {"seed", sc.mc.seed},
                    {"ceiling_multiple", sc.mc.ceiling_multiple},
                    {"exit_gap", sc.mc.exit_gap},
                    {"exit_bias", sc.mc.exit_bias}}},
        {"output", sc.output.empty() ? sc.name + ".csv" : sc.output}};
}

}  // namespace riskpool
