// fairlevel: build populations, solve fair-Bayes problems, audit the structural
// claims and certify the solver against the brute-force oracle.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairlevel/analysis.hpp"
#include "fairlevel/corpus.hpp"
#include "fairlevel/fairbayes.hpp"
#include "fairlevel/oracle.hpp"
#include "fairlevel/reporting.hpp"

namespace fs = std::filesystem;
using namespace fairlevel;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitAuditViolation = 3;
constexpr int kExitCertifyFailure = 4;

struct CommonOpts {
    std::string pop_path;
    std::string scenario_name;
    std::vector<std::string> scenario_params;
    double c = 0.5;
    std::string notion = "all";
    std::string regime = "both";
    std::optional<double> delta;
    std::string delta_grid;
    std::string out_dir = ".";
    double tol_dm = 1e-9;
    double tol_boundary = 1e-12;
    int seed = 0; // reserved; all core computation is deterministic
    int grid_resolution = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_delta, bool with_grid) {
    cmd->add_option("--pop", o.pop_path, "population file (.pop.json)");
    cmd->add_option("--scenario", o.scenario_name, "built-in scenario name");
    cmd->add_option("--param", o.scenario_params, "scenario parameter key=value (repeatable)");
    cmd->add_option("--c", o.c, "cost parameter in [0,1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--notion", o.notion, "dp|eo|pe|all");
    cmd->add_option("--regime", o.regime, "aware|blind|both");
    if (with_delta)
        cmd->add_option("--delta", o.delta, "unfairness tolerance in [0,1]")
            ->check(CLI::Range(0.0, 1.0));
    if (with_grid) cmd->add_option("--delta-grid", o.delta_grid, "grid start:stop:step");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--tol-dm", o.tol_dm, "feasibility tolerance on |DM| <= delta");
    cmd->add_option("--tol-boundary", o.tol_boundary, "threshold-boundary tolerance");
    cmd->add_option("--seed", o.seed, "reserved; computation is deterministic");
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> params;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--param expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        try {
            params[key] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("--param value for '" + key + "' is not a number");
        }
    }
    return params;
}

// Populations selected by the options: one explicit population, or the bundled
// corpus when neither --pop nor --scenario is given (audit/certify only).
std::vector<PopulationSpec> select_populations(const CommonOpts& o, bool corpus_fallback) {
    if (!o.pop_path.empty() && !o.scenario_name.empty())
        throw UsageError("--pop and --scenario are mutually exclusive");
    if (!o.pop_path.empty()) return {load_population_file(o.pop_path)};
    if (!o.scenario_name.empty())
        return {scenario(o.scenario_name, parse_params(o.scenario_params))};
    if (corpus_fallback) return corpus_populations();
    throw UsageError("a population is required: pass --pop <file> or --scenario <name>");
}

std::vector<Notion> select_notions(const std::string& v) {
    if (v == "all") return {Notion::dp, Notion::eo, Notion::pe};
    return {notion_from_string(v)};
}

std::vector<Regime> select_regimes(const std::string& v) {
    if (v == "both") return {Regime::aware, Regime::blind};
    return {regime_from_string(v)};
}

Notion single_notion(const std::string& v) {
    if (v == "all") throw UsageError("this command needs a single --notion (dp|eo|pe)");
    return notion_from_string(v);
}

Regime single_regime(const std::string& v) {
    if (v == "both") throw UsageError("this command needs a single --regime (aware|blind)");
    return regime_from_string(v);
}

std::vector<double> parse_delta_grid(const std::string& text) {
    double start = 0.0, stop = 0.0, step = 0.0;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw UsageError("--delta-grid expects start:stop:step");
    try {
        start = std::stod(text.substr(0, c1));
        stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw UsageError("--delta-grid expects numeric start:stop:step");
    }
    if (step <= 0.0 || stop < start) throw UsageError("--delta-grid needs step > 0, stop >= start");
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    for (int i = 0; i <= n; ++i) grid.push_back(std::min(1.0, start + i * step));
    if (!(grid.front() >= 0.0 && grid.back() <= 1.0))
        throw UsageError("--delta-grid values must lie in [0,1]");
    return grid;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write output file: " + path.string());
    out << content;
}

fs::path out_path(const CommonOpts& o, const std::string& file) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / file;
}

std::string tag(const PopulationSpec& pop, Notion n, Regime r) {
    return pop.name() + "_" + to_string(n) + "_" + to_string(r);
}

int run_validate(const CommonOpts& o) {
    const auto pops = select_populations(o, false);
    const auto& pop = pops.front();
    const PosteriorTables t = derive_posteriors(pop);
    std::cout << "population: " << pop.name() << "\n";
    if (!pop.description().empty()) std::cout << "description: " << pop.description() << "\n";
    std::cout << "cells: " << pop.cells().size()
              << ", aware units: " << decision_units(pop, Regime::aware).size()
              << ", blind units: " << decision_units(pop, Regime::blind).size() << "\n";
    std::cout << "P(S=0)=" << format_num(pop.prior_group(0))
              << " P(S=1)=" << format_num(pop.prior_group(1))
              << " P(Y=1)=" << format_num(pop.prior_label(1)) << "\n";
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y)
            std::cout << "P(S=" << s << ",Y=" << y << ")=" << format_num(pop.prior_group_label(s, y))
                      << (s == 1 && y == 1 ? "\n" : " ");
    for (const auto& cell : pop.cells()) {
        std::cout << "cell " << cell << ": p=" << format_num(pop.cell_mass(cell))
                  << " eta=" << format_num(t.eta_blind.at(cell));
        for (int s = 0; s < 2; ++s) {
            auto eta = t.eta(cell, s);
            std::cout << " eta_s" << s << "=" << (eta ? format_num(*eta) : "undef");
        }
        std::cout << "\n";
    }
    std::cout << "all invariants hold\n";
    return 0;
}

int run_solve(const CommonOpts& o) {
    const auto pop = select_populations(o, false).front();
    const Notion notion = single_notion(o.notion);
    const Regime regime = single_regime(o.regime);
    if (!o.delta) throw UsageError("solve needs --delta");
    const SolveOptions opt{o.tol_dm, o.tol_boundary};

    const FairSolveResult solved = solve(pop, o.c, notion, regime, *o.delta, opt);
    const GroupReport report = rates(solved.classifier, pop, o.c);

    const std::string base = "solve_" + tag(pop, notion, regime);
    write_file(out_path(o, base + ".json"), solve_result_to_json(solved, report, notion, regime));
    write_file(out_path(o, base + ".csv"), report_csv_header() + "\n" +
                                               report_csv_row(*o.delta, solved, report, notion) +
                                               "\n");
    std::cout << "lambda_star=" << format_num(solved.lambda_star)
              << " dm=" << format_num(solved.achieved_dm)
              << " risk=" << format_num(solved.achieved_risk)
              << (solved.already_fair ? " (already fair)" : "") << "\n";
    return 0;
}

int run_sweep(const CommonOpts& o) {
    const auto pop = select_populations(o, false).front();
    const Notion notion = single_notion(o.notion);
    const Regime regime = single_regime(o.regime);
    if (o.delta_grid.empty()) throw UsageError("sweep needs --delta-grid start:stop:step");
    const SolveOptions opt{o.tol_dm, o.tol_boundary};

    const DeltaSweepResult sweep =
        delta_sweep(pop, o.c, notion, regime, parse_delta_grid(o.delta_grid), opt);
    write_file(out_path(o, "sweep_" + tag(pop, notion, regime) + ".csv"),
               sweep_to_csv(sweep, pop, o.c, notion));
    for (const auto& v : sweep.monotonicity_violations)
        std::cerr << "monotonicity violation: " << v << "\n";
    for (const auto& note : sweep.observations) std::cout << "note: " << note << "\n";
    std::cout << sweep.results.size() << " grid points written\n";
    return 0;
}

int run_audit(const CommonOpts& o) {
    const auto pops = select_populations(o, true);
    std::vector<double> deltas =
        o.delta_grid.empty() ? std::vector<double>{0.0, 0.05, 0.2, 0.5}
                             : parse_delta_grid(o.delta_grid);
    if (o.delta) deltas = {*o.delta};
    const SolveOptions opt{o.tol_dm, o.tol_boundary};

    std::vector<AuditGridPoint> grid;
    for (Notion n : select_notions(o.notion))
        for (Regime r : select_regimes(o.regime))
            for (double d : deltas) grid.push_back({n, r, d});

    std::vector<AuditReport> reports;
    for (const auto& pop : pops) reports.push_back(audit(pop, o.c, grid, opt));

    write_file(out_path(o, "audit.json"), audit_report_to_json(reports));
    write_file(out_path(o, "audit.csv"), audit_report_to_csv(reports));
    const std::string table = audit_report_to_table(reports);
    write_file(out_path(o, "audit.txt"), table);
    std::cout << table;

    for (const auto& r : reports)
        if (r.any_aware_violation()) return kExitAuditViolation;
    return 0;
}

int run_certify(const CommonOpts& o) {
    const auto pops = select_populations(o, true);
    const std::vector<double> deltas =
        o.delta ? std::vector<double>{*o.delta}
                : (o.delta_grid.empty() ? std::vector<double>{0.0, 0.05, 0.2, 0.5}
                                        : parse_delta_grid(o.delta_grid));

    bool all_pass = true;
    nlohmann::json results = nlohmann::json::array();
    for (const auto& pop : pops) {
        for (Notion n : select_notions(o.notion)) {
            for (Regime r : select_regimes(o.regime)) {
                for (double d : deltas) {
                    const CertifyResult res = certify(pop, o.c, n, r, d, o.grid_resolution);
                    all_pass = all_pass && res.pass;
                    results.push_back(nlohmann::json::parse(
                        certify_result_to_json(res, pop, o.c, n, r, d)));
                    std::cout << (res.pass ? "pass " : "FAIL ") << pop.name() << " "
                              << to_string(n) << "/" << to_string(r)
                              << " delta=" << format_num(d) << " gap=" << format_num(res.gap)
                              << "\n";
                }
            }
        }
    }
    write_file(out_path(o, "certify.json"), results.dump(2));
    return all_pass ? 0 : kExitCertifyFailure;
}

int run_chart(const CommonOpts& o) {
    const auto pop = select_populations(o, false).front();
    const Notion notion = single_notion(o.notion);
    const Regime regime = single_regime(o.regime);
    if (!o.delta) throw UsageError("chart needs --delta");
    const SolveOptions opt{o.tol_dm, o.tol_boundary};

    const FairSolveResult solved = solve(pop, o.c, notion, regime, *o.delta, opt);
    const GroupReport fair = rates(solved.classifier, pop, o.c);
    const GroupReport base =
        rates(bayes_unconstrained(pop, o.c, regime, o.tol_boundary), pop, o.c);

    const std::string stem = "chart_" + tag(pop, notion, regime);
    write_file(out_path(o, stem + ".svg"),
               chart_svg(pop, o.c, notion, regime, *o.delta, base, fair));
    write_file(out_path(o, stem + ".csv"), chart_csv(notion, base, fair));
    std::cout << stem << ".svg written\n";
    return 0;
}

void emit_error(const std::string& type, const std::string& message) {
    nlohmann::json j;
    j["error"]["type"] = type;
    j["error"]["message"] = message;
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairlevel: Bayes-optimal fair classification and leveling audits"};
    app.require_subcommand(1);

    CommonOpts o;
    auto* validate = app.add_subcommand("validate", "load a population and print diagnostics");
    add_common(validate, o, false, false);
    auto* solve_cmd = app.add_subcommand("solve", "solve the fair-Bayes problem at one delta");
    add_common(solve_cmd, o, true, false);
    auto* sweep = app.add_subcommand("sweep", "solve across a delta grid, write CSV");
    add_common(sweep, o, false, true);
    auto* audit_cmd = app.add_subcommand("audit", "run the structural claim audit");
    add_common(audit_cmd, o, true, true);
    auto* certify_cmd = app.add_subcommand("certify", "compare the solver with the oracle");
    add_common(certify_cmd, o, true, true);
    certify_cmd->add_option("--grid", o.grid_resolution,
                            "oracle grid resolution (0 = auto from unit count)");
    auto* chart = app.add_subcommand("chart", "grouped NTR bar chart (SVG + CSV)");
    add_common(chart, o, true, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(o);
        if (solve_cmd->parsed()) return run_solve(o);
        if (sweep->parsed()) return run_sweep(o);
        if (audit_cmd->parsed()) return run_audit(o);
        if (certify_cmd->parsed()) return run_certify(o);
        if (chart->parsed()) return run_chart(o);
    } catch (const ParseError& e) {
        emit_error("parse", e.what());
        return kExitValidation;
    } catch (const ValidationError& e) {
        emit_error("validation", e.what());
        return kExitValidation;
    } catch (const UsageError& e) {
        emit_error("usage", e.what());
        return kExitValidation;
    } catch (const SolverError& e) {
        emit_error("solver", e.what());
        return kExitSolver;
    } catch (const Error& e) {
        emit_error("internal", e.what());
        return kExitSolver;
    }
    return 0;
}
