#include "fairlevel/population.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairlevel/log.hpp"

namespace fairlevel {

using nlohmann::json;

int PopulationSpec::check_bit(int v) {
    if (v != 0 && v != 1) throw UsageError("group/label index must be 0 or 1");
    return v;
}

PopulationSpec PopulationSpec::from_entries(std::string name, std::string description,
                                            std::vector<MassEntry> entries) {
    PopulationSpec spec;
    spec.name_ = std::move(name);
    spec.description_ = std::move(description);

    for (const auto& e : entries) {
        if (e.group != 0 && e.group != 1)
            throw ValidationError("invalid group " + std::to_string(e.group) + " in cell '" +
                                  e.cell + "' (must be 0 or 1)");
        if (e.label != 0 && e.label != 1)
            throw ValidationError("invalid label " + std::to_string(e.label) + " in cell '" +
                                  e.cell + "' (must be 0 or 1)");
        if (!(e.mass >= 0.0) || !std::isfinite(e.mass))
            throw ValidationError("negative mass: cell '" + e.cell + "' s=" +
                                  std::to_string(e.group) + " y=" + std::to_string(e.label) +
                                  " has p=" + std::to_string(e.mass));
    }

    std::sort(entries.begin(), entries.end(), [](const MassEntry& a, const MassEntry& b) {
        return std::tie(a.cell, a.group, a.label) < std::tie(b.cell, b.group, b.label);
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const auto& a = entries[i - 1];
        const auto& b = entries[i];
        if (a.cell == b.cell && a.group == b.group && a.label == b.label)
            throw ValidationError("duplicate triple: cell '" + a.cell + "' s=" +
                                  std::to_string(a.group) + " y=" + std::to_string(a.label));
    }

    double sum = 0.0;
    for (const auto& e : entries) sum += e.mass;
    if (std::fabs(sum - 1.0) > kMassSumTolerance)
        throw ValidationError("mass sum is " + std::to_string(sum) +
                              ", expected 1 within 1e-9");

    // Normalize exactly, then drop zero-mass entries.
    for (auto& e : entries) e.mass /= sum;
    for (const auto& e : entries) {
        if (e.mass <= 0.0) continue;
        spec.entries_.push_back(e);
        spec.mass_[{e.cell, e.group, e.label}] = e.mass;
        spec.prior_group_[e.group] += e.mass;
        spec.prior_group_label_[e.group][e.label] += e.mass;
        if (spec.cells_.empty() || spec.cells_.back() != e.cell) spec.cells_.push_back(e.cell);
    }

    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y)
            if (!(spec.prior_group_label_[s][y] > 0.0))
                throw ValidationError("degenerate group-label pair: P(S=" + std::to_string(s) +
                                      ", Y=" + std::to_string(y) + ") = 0");

    return spec;
}

double PopulationSpec::mass(const CellId& cell, int group, int label) const {
    auto it = mass_.find({cell, check_bit(group), check_bit(label)});
    return it == mass_.end() ? 0.0 : it->second;
}

double PopulationSpec::cell_mass(const CellId& cell) const {
    double m = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y) m += mass(cell, s, y);
    return m;
}

double PopulationSpec::cell_group_mass(const CellId& cell, int group) const {
    return mass(cell, group, 0) + mass(cell, group, 1);
}

double PopulationSpec::cell_label_mass(const CellId& cell, int label) const {
    return mass(cell, 0, label) + mass(cell, 1, label);
}

PosteriorTables derive_posteriors(const PopulationSpec& spec) {
    PosteriorTables t;
    t.prior_group = {spec.prior_group(0), spec.prior_group(1)};
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y) t.prior_group_label[s][y] = spec.prior_group_label(s, y);

    for (const auto& cell : spec.cells()) {
        const double px = spec.cell_mass(cell);
        t.eta_blind[cell] = spec.cell_label_mass(cell, 1) / px;
        for (int s = 0; s < 2; ++s) {
            const double pxs = spec.cell_group_mass(cell, s);
            t.group_given_x[{cell, s}] = pxs / px;
            for (int y = 0; y < 2; ++y) t.joint_given_x[{cell, s, y}] = spec.mass(cell, s, y) / px;
            if (pxs > 0.0) t.eta_aware[{cell, s}] = spec.mass(cell, s, 1) / pxs;
        }
    }
    return t;
}

std::optional<double> PosteriorTables::eta(const CellId& cell, int group) const {
    auto it = eta_aware.find({cell, group});
    if (it == eta_aware.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Document format

PopulationSpec load_population(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        throw ParseError(std::string("population document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("population document must be a JSON object");
    if (!doc.contains("cells") || !doc["cells"].is_array())
        throw ParseError("population document requires a 'cells' array");

    std::vector<MassEntry> entries;
    for (const auto& c : doc["cells"]) {
        if (!c.is_object() || !c.contains("x") || !c.contains("s") || !c.contains("y") ||
            !c.contains("p"))
            throw ParseError("each cell entry needs fields x, s, y, p");
        if (!c["x"].is_string()) throw ParseError("cell field 'x' must be a string");
        if (!c["s"].is_number_integer() || !c["y"].is_number_integer())
            throw ParseError("cell fields 's' and 'y' must be integers");
        if (!c["p"].is_number()) throw ParseError("cell field 'p' must be a number");
        entries.push_back({c["x"].get<std::string>(), c["s"].get<int>(), c["y"].get<int>(),
                           c["p"].get<double>()});
    }
    return PopulationSpec::from_entries(doc.value("name", std::string{}),
                                        doc.value("description", std::string{}),
                                        std::move(entries));
}

PopulationSpec load_population_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open population file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_population(buf.str());
}

std::string population_to_document(const PopulationSpec& spec) {
    json doc;
    doc["name"] = spec.name();
    doc["description"] = spec.description();
    doc["cells"] = json::array();
    for (const auto& e : spec.entries()) {
        doc["cells"].push_back({{"x", e.cell}, {"s", e.group}, {"y", e.label}, {"p", e.mass}});
    }
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Scenario families

namespace {

double take_param(std::map<std::string, double>& params, const std::string& key, double dflt) {
    auto it = params.find(key);
    if (it == params.end()) return dflt;
    const double v = it->second;
    params.erase(it);
    return v;
}

void reject_leftover(const std::map<std::string, double>& params, const std::string& scenario) {
    if (params.empty()) return;
    throw UsageError("unknown parameter '" + params.begin()->first + "' for scenario " + scenario);
}

void require_open_unit(double v, const std::string& what) {
    if (!(v > 0.0 && v < 1.0))
        throw UsageError("parameter " + what + " must lie strictly inside (0, 1)");
}

// Entries for one cell given its mass, P(S=1 | cell) and per-group eta.
void push_cell(std::vector<MassEntry>& out, const CellId& cell, double m, double q, double eta1,
               double eta0) {
    out.push_back({cell, 1, 1, m * q * eta1});
    out.push_back({cell, 1, 0, m * q * (1.0 - eta1)});
    out.push_back({cell, 0, 1, m * (1.0 - q) * eta0});
    out.push_back({cell, 0, 0, m * (1.0 - q) * (1.0 - eta0)});
}

PopulationSpec two_point_aware(std::map<std::string, double> params) {
    const double eta1 = take_param(params, "eta1", 0.9);
    const double eta0 = take_param(params, "eta0", 0.3);
    const double p1 = take_param(params, "p1", 0.5);
    reject_leftover(params, "two-point-aware");
    require_open_unit(eta1, "eta1");
    require_open_unit(eta0, "eta0");
    require_open_unit(p1, "p1");

    std::vector<MassEntry> entries{
        {"g1", 1, 1, p1 * eta1},
        {"g1", 1, 0, p1 * (1.0 - eta1)},
        {"g0", 0, 1, (1.0 - p1) * eta0},
        {"g0", 0, 0, (1.0 - p1) * (1.0 - eta0)},
    };
    return PopulationSpec::from_entries(
        "two-point-aware", "one cell per group; eta(.,1) and eta(.,0) set directly",
        std::move(entries));
}

PopulationSpec symmetric_null(std::map<std::string, double> params) {
    const double eta_hi = take_param(params, "eta_hi", 0.8);
    const double eta_lo = take_param(params, "eta_lo", 0.2);
    reject_leftover(params, "symmetric-null");
    require_open_unit(eta_hi, "eta_hi");
    require_open_unit(eta_lo, "eta_lo");

    std::vector<MassEntry> entries;
    push_cell(entries, "hi", 0.5, 0.5, eta_hi, eta_hi);
    push_cell(entries, "lo", 0.5, 0.5, eta_lo, eta_lo);
    return PopulationSpec::from_entries(
        "symmetric-null", "both groups share identical cell-conditional distributions",
        std::move(entries));
}

// Three cells, P(S=1) = 0.5, tuned for c = 0.5: the two group-1-leaning cells
// are selected and carry the smaller zeta, so A_max <= B_min for DP and the
// fair rule can only delete from the advantaged-like side.
PopulationSpec blind_separated_high(std::map<std::string, double> params) {
    reject_leftover(params, "blind-separated-high");
    std::vector<MassEntry> entries;
    push_cell(entries, "a", 0.25, 0.9, 0.8, 0.8);  // zeta_DP = 0.3/1.6  = 0.1875
    push_cell(entries, "b", 0.25, 0.8, 0.7, 0.7);  // zeta_DP = 0.2/1.2  = 0.1667
    push_cell(entries, "c", 0.50, 0.15, 0.2, 0.2); // zeta_DP = 0.3/1.4  = 0.2143
    return PopulationSpec::from_entries(
        "blind-separated-high", "deletion-only blind construction (A_max <= B_min for DP, c=0.5)",
        std::move(entries));
}

// Mirror construction: the rejected group-0-leaning cell carries the smaller
// zeta, so B_max < A_min for DP and the fair rule can only add on the
// disadvantaged-like side.
PopulationSpec blind_separated_low(std::map<std::string, double> params) {
    reject_leftover(params, "blind-separated-low");
    std::vector<MassEntry> entries;
    push_cell(entries, "a", 0.25, 0.9, 0.9, 0.9);    // zeta_DP = 0.4/1.6  = 0.25
    push_cell(entries, "b", 0.25, 0.8, 0.85, 0.85);  // zeta_DP = 0.35/1.2 = 0.2917
    push_cell(entries, "c", 0.50, 0.15, 0.45, 0.45); // zeta_DP = 0.05/1.4 = 0.0357
    return PopulationSpec::from_entries(
        "blind-separated-low", "addition-only blind construction (B_max < A_min for DP, c=0.5)",
        std::move(entries));
}

// Deterministic generated population: `cells` dual-group cells from a small
// LCG stream, values rounded to 4 decimals and kept strictly interior so the
// result always validates.
PopulationSpec custom_grid(std::map<std::string, double> params) {
    const double cells_f = take_param(params, "cells", 3.0);
    const double seed_f = take_param(params, "seed", 1.0);
    reject_leftover(params, "custom-grid");
    if (cells_f < 2.0 || cells_f > 6.0 || cells_f != std::floor(cells_f))
        throw UsageError("parameter cells must be an integer in [2, 6]");
    if (seed_f < 0.0 || seed_f != std::floor(seed_f))
        throw UsageError("parameter seed must be a non-negative integer");
    const int n = static_cast<int>(cells_f);

    std::uint64_t state = 0x9e3779b97f4a7c15ULL ^ (static_cast<std::uint64_t>(seed_f) + 1);
    auto next_unit = [&state]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>((state >> 33) & 0xffffffffULL) / 4294967296.0;
    };
    auto rounded = [](double v) { return std::round(v * 10000.0) / 10000.0; };

    std::vector<MassEntry> entries;
    std::vector<double> weights;
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        weights.push_back(0.2 + next_unit());
        wsum += weights.back();
    }
    for (int i = 0; i < n; ++i) {
        const double m = weights[i] / wsum;
        const double q = rounded(0.1 + 0.8 * next_unit());
        const double e = rounded(0.1 + 0.8 * next_unit());
        // eta1 within its feasible interval so eta0 = (e - q eta1)/(1-q) stays in [0,1].
        const double lo = std::max(0.05, (e - (1.0 - q)) / q);
        const double hi = std::min(0.95, e / q);
        const double eta1 = rounded(lo + (hi - lo) * (0.2 + 0.6 * next_unit()));
        const double eta0 = (e - q * eta1) / (1.0 - q);
        push_cell(entries, "x" + std::to_string(i), m, q, eta1, std::clamp(eta0, 0.0, 1.0));
    }
    // Normalization inside from_entries absorbs the rounding drift.
    double total = 0.0;
    for (const auto& e : entries) total += e.mass;
    for (auto& e : entries) e.mass /= total;

    return PopulationSpec::from_entries(
        "custom-grid-" + std::to_string(static_cast<long>(seed_f)) + "-" + std::to_string(n),
        "generated population (seed " + std::to_string(static_cast<long>(seed_f)) + ", " +
            std::to_string(n) + " cells)",
        std::move(entries));
}

} // namespace

PopulationSpec scenario(const std::string& name, const std::map<std::string, double>& params) {
    log_debug("building scenario " + name);
    if (name == "two-point-aware") return two_point_aware(params);
    if (name == "symmetric-null") return symmetric_null(params);
    if (name == "blind-separated-high") return blind_separated_high(params);
    if (name == "blind-separated-low") return blind_separated_low(params);
    if (name == "custom-grid") return custom_grid(params);
    throw UsageError("unknown scenario name: " + name);
}

} // namespace fairlevel
