// Command-line surface for the risk-pool solver library.
//
//   riskpool_cli validate    --scenario FILE [--json] [--dump-normalized]
//   riskpool_cli ruin        --scenario FILE [--method M] [--out DIR] [--seed N]
//   riskpool_cli reproduce   --figure N [--scenario-dir DIR] [--out DIR]
//   riskpool_cli order-check --scenario FILE [--out DIR]
//
// Exit codes: 0 success, 1 parse/usage error, 2 model-assumption failure
// (validation failure, net-profit violation, grid overflow, failed ordering),
// 3 method/claim-law mismatch.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskpool/riskpool.hpp"

namespace {

using namespace riskpool;

std::string fmt(double v) { return detail::fmt9(v); }

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

nlohmann::json report_to_json(const Scenario& sc, const ValidationReport& rep) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : rep.capacity_violations)
        violations.push_back({{"row", v.row + 1},
                              {"col", v.col + 1},
                              {"excess", v.excess}});
    return {{"scenario", sc.name},
            {"full_allocation", to_string(rep.full_allocation)},
            {"fairness", to_string(rep.fairness)},
            {"capacity", to_string(rep.capacity)},
            {"scale_family", to_string(rep.scale_family)},
            {"net_profit", to_string(rep.net_profit)},
            {"column_residuals", rep.column_residuals},
            {"fairness_residuals", rep.fairness_residuals},
            {"capacity_violations", violations},
            {"scale_family_detail", rep.scale_family_detail},
            {"net_profit_margin", rep.net_profit_margin}};
}

void print_report(const Scenario& sc, const ValidationReport& rep) {
    double worst_col = 0.0, worst_fair = 0.0;
    for (double r : rep.column_residuals)
        worst_col = std::max(worst_col, std::abs(r));
    for (double r : rep.fairness_residuals)
        worst_fair = std::max(worst_fair, std::abs(r));

    std::cout << "scenario: " << sc.name << " (" << sc.pool.size()
              << " participants, eta = " << fmt(sc.pool.eta) << ")\n";
    std::cout << "full_allocation: " << to_string(rep.full_allocation)
              << "  (max |column sum - 1| = " << fmt(worst_col) << ")\n";
    std::cout << "fairness:        " << to_string(rep.fairness)
              << "  (max |residual| = " << fmt(worst_fair) << ")\n";
    std::cout << "capacity:        " << to_string(rep.capacity);
    if (rep.capacity_violations.empty()) {
        std::cout << "\n";
    } else {
        std::cout << "  (" << rep.capacity_violations.size() << " violation"
                  << (rep.capacity_violations.size() == 1 ? "" : "s") << ":";
        for (const auto& v : rep.capacity_violations)
            std::cout << " (" << v.row + 1 << "," << v.col + 1
                      << ") excess " << fmt(v.excess);
        std::cout << ")\n";
    }
    std::cout << "scale_family:    " << to_string(rep.scale_family) << "  ("
              << rep.scale_family_detail << ")\n";
    std::cout << "net_profit:      " << to_string(rep.net_profit)
              << "  (margin = " << fmt(rep.net_profit_margin) << ")\n";
}

int run_validate(const std::string& scenario_path, bool as_json,
                 bool dump_normalized) {
    const Scenario sc = parse_scenario_file(scenario_path);
    const AllocationMatrix a = resolve_matrix(sc.pool, sc.matrix);
    const ValidationReport rep = validate(sc.pool, a);

    if (dump_normalized) {
        std::cout << scenario_to_json(sc).dump(2) << "\n";
    } else if (as_json) {
        std::cout << report_to_json(sc, rep).dump() << "\n";
    } else {
        print_report(sc, rep);
    }

    const bool ok = rep.full_allocation == CheckStatus::pass &&
                    rep.fairness == CheckStatus::pass &&
                    rep.capacity == CheckStatus::pass &&
                    rep.scale_family != CheckStatus::fail &&
                    rep.net_profit == CheckStatus::pass;
    return ok ? 0 : 2;
}

// ---------------------------------------------------------------------------
// ruin
// ---------------------------------------------------------------------------

CurveOptions curve_options(const Scenario& sc, RuinMethod method,
                           std::optional<std::uint64_t> seed) {
    CurveOptions opts;
    opts.method = method;
    opts.panjer = sc.panjer;
    opts.mc = sc.mc;
    if (seed) opts.mc.seed = *seed;
    return opts;
}

void write_output(const std::string& out_dir, const std::string& filename,
                  const std::string& content) {
    if (out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / filename;
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
    std::cerr << "wrote " << path.string() << "\n";
}

int run_ruin(const std::string& scenario_path, const std::string& method_flag,
             const std::string& out_dir, std::optional<std::uint64_t> seed) {
    const Scenario sc = parse_scenario_file(scenario_path);
    const AllocationMatrix a = resolve_matrix(sc.pool, sc.matrix);
    const std::vector<double> grid = sc.kappa_grid.points();

    std::vector<RuinMethod> methods = sc.methods;
    if (!method_flag.empty())
        methods = {detail::method_from_string(method_flag, "--method")};

    std::ostringstream csv;
    csv << "kappa,psi,lower,upper,method,participant,mode\n";
    for (RuinMethod m : methods) {
        const auto curves =
            ruin_curves(sc.pool, a, grid, curve_options(sc, m, seed));
        for (std::size_t i = 0; i < curves.size(); ++i) {
            write_curve_csv_rows(csv, curves[i].standalone, i, "standalone");
            write_curve_csv_rows(csv, curves[i].pooled, i, "pooled");
        }
    }
    write_output(out_dir, sc.output.empty() ? sc.name + ".csv" : sc.output,
                 csv.str());
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

struct Classification {
    bool benefit_all = true;       // pooled <= standalone at every grid point
    bool proven_reversal = false;  // pooled provably above standalone somewhere
    double worst_gap = -1e300;     // max over grid of pooled - standalone
    double worst_kappa = 0.0;
};

// Compares a participant's pooled curve against their stand-alone curve,
// using each method's own uncertainty: closed-form curves carry none, Panjer
// curves their bound width, MC curves their CI half-width.
Classification classify(const ParticipantCurves& pc) {
    Classification c;
    for (std::size_t i = 0; i < pc.standalone.kappas.size(); ++i) {
        const double slack =
            0.5 * ((pc.pooled.upper[i] - pc.pooled.lower[i]) +
                   (pc.standalone.upper[i] - pc.standalone.lower[i]));
        const double gap = pc.pooled.psi[i] - pc.standalone.psi[i];
        if (gap > c.worst_gap) {
            c.worst_gap = gap;
            c.worst_kappa = pc.standalone.kappas[i];
        }
        if (gap > slack + 1e-9) c.benefit_all = false;
        if (pc.pooled.lower[i] > pc.standalone.upper[i] + 1e-12)
            c.proven_reversal = true;
    }
    return c;
}

struct FigureExpectation {
    std::vector<std::size_t> benefit;   // participants expected to benefit (0-based)
    std::vector<std::size_t> reversal;  // participants expected to see reversal
    bool benefit_everyone = false;
};

FigureExpectation figure_expectation(int figure, std::size_t n) {
    FigureExpectation e;
    switch (figure) {
        case 1:
        case 4:
            e.benefit_everyone = true;
            for (std::size_t i = 0; i < n; ++i) e.benefit.push_back(i);
            break;
        case 2:
            e.reversal = {2};
            break;
        case 3:
            e.reversal = {0, 2};
            e.benefit = {1};
            break;
        default:
            e.reversal = {2};
            e.benefit = {0};
            break;
    }
    return e;
}

int run_reproduce(int figure, const std::string& scenario_dir,
                  const std::string& out_dir,
                  std::optional<std::uint64_t> seed) {
    bool all_ok = true;
    for (const std::string suffix : {"mp", "alt"}) {
        const std::string path = scenario_dir + "/figure" +
                                 std::to_string(figure) + "_" + suffix + ".json";
        const Scenario sc = parse_scenario_file(path);
        const AllocationMatrix a = resolve_matrix(sc.pool, sc.matrix);
        const std::vector<double> grid = sc.kappa_grid.points();
        const auto curves = ruin_curves(sc.pool, a, grid,
                                        curve_options(sc, sc.methods.front(), seed));

        if (!out_dir.empty()) {
            std::ostringstream csv;
            csv << "kappa,psi,lower,upper,method,participant,mode\n";
            for (std::size_t i = 0; i < curves.size(); ++i) {
                write_curve_csv_rows(csv, curves[i].standalone, i, "standalone");
                write_curve_csv_rows(csv, curves[i].pooled, i, "pooled");
            }
            write_output(out_dir,
                         sc.output.empty() ? sc.name + ".csv" : sc.output,
                         csv.str());
        }

        const FigureExpectation expect =
            figure_expectation(figure, curves.size());
        for (std::size_t i = 0; i < curves.size(); ++i) {
            const Classification c = classify(curves[i]);
            std::cout << "figure " << figure << " [" << suffix
                      << "] participant " << i + 1 << ": "
                      << (c.benefit_all
                              ? "pooled <= standalone at every grid point"
                              : c.proven_reversal
                                    ? "pooled > standalone at some grid point"
                                    : "inconclusive within method tolerance")
                      << " (worst pooled-standalone gap " << fmt(c.worst_gap)
                      << " at kappa = " << fmt(c.worst_kappa) << ")\n";
        }

        bool ok = true;
        if (expect.benefit_everyone) {
            for (std::size_t i = 0; i < curves.size(); ++i)
                ok = ok && classify(curves[i]).benefit_all;
            std::cout << "figure " << figure << " [" << suffix
                      << "] verdict: pooling benefits every participant: "
                      << (ok ? "confirmed" : "NOT confirmed") << "\n";
        } else {
            for (std::size_t i : expect.reversal) {
                const bool rev = classify(curves[i]).proven_reversal;
                ok = ok && rev;
                std::cout << "figure " << figure << " [" << suffix
                          << "] verdict: participant " << i + 1
                          << " sees pooled > standalone somewhere: "
                          << (rev ? "confirmed" : "NOT confirmed") << "\n";
            }
            for (std::size_t i : expect.benefit) {
                const bool ben = classify(curves[i]).benefit_all;
                ok = ok && ben;
                std::cout << "figure " << figure << " [" << suffix
                          << "] verdict: participant " << i + 1
                          << " benefits everywhere: "
                          << (ben ? "confirmed" : "NOT confirmed") << "\n";
            }
        }
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 2;
}

// ---------------------------------------------------------------------------
// order-check
// ---------------------------------------------------------------------------

int run_order_check(const std::string& scenario_path,
                    const std::string& out_dir) {
    const Scenario sc = parse_scenario_file(scenario_path);
    const AllocationMatrix a = resolve_matrix(sc.pool, sc.matrix);

    bool all_ok = true;
    for (std::size_t i = 0; i < sc.pool.size(); ++i) {
        const StopLossComparison cmp = check_pooled_dominance(sc.pool, a, i);
        all_ok = all_ok && cmp.dominated;
        std::cout << "participant " << i + 1
                  << ": pooled claim convex-dominated by thinned stand-alone: "
                  << (cmp.dominated ? "yes" : "no");
        if (!cmp.dominated) {
            if (cmp.mean_gap > cmp.tol)
                std::cout << " (mean gap " << fmt(cmp.mean_gap) << ")";
            if (cmp.first_violation)
                std::cout << " (first violation at t = "
                          << fmt(cmp.first_violation->first) << ", excess "
                          << fmt(cmp.first_violation->second) << ")";
        }
        std::cout << "\n";
        if (!out_dir.empty()) {
            std::ostringstream csv;
            write_comparison_csv(csv, cmp);
            write_output(out_dir,
                         sc.name + "_order_p" + std::to_string(i + 1) + ".csv",
                         csv.str());
        }
    }

    const double lam0 = sc.pool.participants.front().lambda;
    bool homogeneous = true;
    for (const auto& p : sc.pool.participants)
        homogeneous = homogeneous &&
                      std::abs(p.lambda - lam0) <= 1e-9 * std::max(1.0, lam0);
    if (homogeneous) {
        const NormalizedChainReport chain = normalized_chain_check(sc.pool);
        for (const auto& pc : chain.pairs) {
            std::cout << "normalized chain: Y" << pc.large + 1 << "/b"
                      << pc.large + 1 << " vs Y" << pc.small + 1 << "/b"
                      << pc.small + 1 << ": "
                      << (pc.comparison.dominated ? "dominated" : "NOT dominated")
                      << "\n";
        }
    } else {
        std::cout << "normalized chain: skipped (claim frequencies are not "
                     "homogeneous)\n";
    }
    return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ruin probabilities for proportional risk-sharing pools"};
    app.require_subcommand(1);

    std::string scenario_path, method_flag, out_dir;
    std::string scenario_dir = []() -> std::string {
        if (const char* env = std::getenv("RISKPOOL_SCENARIO_DIR")) return env;
#ifdef RISKPOOL_SCENARIO_DIR
        return RISKPOOL_SCENARIO_DIR;
#else
        return "scenarios";
#endif
    }();
    int figure = 1;
    bool as_json = false, dump_normalized = false;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Check a scenario's sharing rule");
    validate_cmd->add_option("--scenario", scenario_path, "scenario file")
        ->required();
    validate_cmd->add_flag("--json", as_json, "emit a single JSON report line");
    validate_cmd->add_flag("--dump-normalized", dump_normalized,
                           "print the normalized scenario instead of a report");

    CLI::App* ruin_cmd =
        app.add_subcommand("ruin", "Compute stand-alone and pooled ruin curves");
    ruin_cmd->add_option("--scenario", scenario_path, "scenario file")
        ->required();
    ruin_cmd->add_option("--method", method_flag,
                         "force a method: closed|panjer|mc|auto");
    ruin_cmd->add_option("--out", out_dir,
                         "output directory (default: CSV to stdout)");
    CLI::Option* ruin_seed =
        ruin_cmd->add_option("--seed", seed_value, "Monte Carlo master seed");

    CLI::App* repro_cmd =
        app.add_subcommand("reproduce", "Re-run an embedded figure scenario");
    repro_cmd->add_option("--figure", figure, "figure number 1-5")
        ->required()
        ->check(CLI::Range(1, 5));
    repro_cmd->add_option("--scenario-dir", scenario_dir,
                          "directory holding the embedded scenario files");
    repro_cmd->add_option("--out", out_dir, "directory for curve CSVs");
    CLI::Option* repro_seed =
        repro_cmd->add_option("--seed", seed_value, "Monte Carlo master seed");

    CLI::App* order_cmd = app.add_subcommand(
        "order-check", "Convex-order comparisons for a scenario");
    order_cmd->add_option("--scenario", scenario_path, "scenario file")
        ->required();
    order_cmd->add_option("--out", out_dir, "directory for comparison CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate_cmd->parsed())
            return run_validate(scenario_path, as_json, dump_normalized);
        if (ruin_cmd->parsed()) {
            if (ruin_seed->count() > 0) seed = seed_value;
            return run_ruin(scenario_path, method_flag, out_dir, seed);
        }
        if (repro_cmd->parsed()) {
            if (repro_seed->count() > 0) seed = seed_value;
            return run_reproduce(figure, scenario_dir, out_dir, seed);
        }
        if (order_cmd->parsed())
            return run_order_check(scenario_path, out_dir);
        return 1;
    } catch (const MethodMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
