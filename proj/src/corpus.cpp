#include "fairlevel/corpus.hpp"

#include <vector>

namespace fairlevel {

namespace {

void push_cell(std::vector<MassEntry>& out, const CellId& cell, double m, double q, double eta1,
               double eta0) {
    out.push_back({cell, 1, 1, m * q * eta1});
    out.push_back({cell, 1, 0, m * q * (1.0 - eta1)});
    out.push_back({cell, 0, 1, m * (1.0 - q) * eta0});
    out.push_back({cell, 0, 0, m * (1.0 - q) * (1.0 - eta0)});
}

// Separated-high shape with the per-group etas split on the selected cells so
// that zeta runs against eta_1 and with eta_0 on the advantaged-like side:
// at c=0.5 the fair rule deletes cell b first, group 1 precision drops, group 0
// precision rises.
PopulationSpec blind_precision_down() {
    std::vector<MassEntry> entries;
    push_cell(entries, "a", 0.25, 0.9, 0.78, 0.98); // zeta_DP = 0.1875
    push_cell(entries, "b", 0.25, 0.8, 0.86, 0.06); // zeta_DP = 0.1667 (deleted first)
    push_cell(entries, "c", 0.50, 0.15, 0.2, 0.2);  // zeta_DP = 0.2143
    return PopulationSpec::from_entries(
        "blind-precision-down", "deletion-only blind construction with anti-aligned eta_1",
        std::move(entries));
}

// Separated-low shape where the admitted disadvantaged-like cells carry higher
// eta_1 than the incumbents (masked high-quality candidates): group 1 precision
// rises, group 0 precision falls.
PopulationSpec blind_precision_up() {
    std::vector<MassEntry> entries;
    push_cell(entries, "a", 0.4, 0.8, 0.64, 0.94);  // zeta_DP = 0.1667, selected
    push_cell(entries, "c", 0.3, 0.3, 0.80, 0.30);  // zeta_DP = 0.0625, admitted first
    push_cell(entries, "d", 0.3, 0.3, 0.90, 0.1857142857142857); // zeta_DP = 0.125
    return PopulationSpec::from_entries(
        "blind-precision-up", "addition-only blind construction with aligned eta_1 on q_low",
        std::move(entries));
}

// Two dual-group cells plus one single-group cell per group: exercises
// undefined eta(x,s) handling while staying at six aware units.
PopulationSpec single_group_cells() {
    std::vector<MassEntry> entries;
    push_cell(entries, "m1", 0.3, 0.5, 0.8, 0.6);
    push_cell(entries, "m2", 0.3, 0.5, 0.3, 0.45);
    entries.push_back({"only1", 1, 1, 0.14});
    entries.push_back({"only1", 1, 0, 0.06});
    entries.push_back({"only0", 0, 1, 0.04});
    entries.push_back({"only0", 0, 0, 0.16});
    return PopulationSpec::from_entries(
        "single-group-cells", "cells present for one group only (undefined aware posteriors)",
        std::move(entries));
}

// One cell with composition equal to the group priors: nu_DP vanishes there
// exactly (binary-exact fractions keep the cancellation clean).
PopulationSpec neutral_cell() {
    std::vector<MassEntry> entries;
    push_cell(entries, "n", 0.5, 0.5, 0.75, 0.25);   // P(S=1|n) = 0.5 = P(S=1)
    push_cell(entries, "p", 0.25, 0.75, 0.875, 0.5); // group-1-leaning
    push_cell(entries, "q", 0.25, 0.25, 0.5, 0.125); // group-0-leaning
    return PopulationSpec::from_entries(
        "neutral-cell", "composition of cell n matches the priors, so nu_DP(n) = 0",
        std::move(entries));
}

std::vector<PopulationSpec> build() {
    std::vector<PopulationSpec> pops;

    auto named = [&pops](PopulationSpec spec, const std::string& name) {
        pops.push_back(PopulationSpec::from_entries(name, spec.description(), spec.entries()));
    };

    named(scenario("two-point-aware", {}), "two-point-default");
    named(scenario("two-point-aware", {{"eta1", 0.7}, {"eta0", 0.4}}), "two-point-mild");
    named(scenario("two-point-aware", {{"eta1", 0.95}, {"eta0", 0.05}}), "two-point-extreme");
    named(scenario("two-point-aware", {{"eta1", 0.85}, {"eta0", 0.35}, {"p1", 0.3}}),
          "two-point-skewed");
    named(scenario("symmetric-null", {}), "symmetric-null-default");
    named(scenario("symmetric-null", {{"eta_hi", 0.6}, {"eta_lo", 0.4}}), "symmetric-null-tight");
    pops.push_back(scenario("blind-separated-high", {}));
    pops.push_back(scenario("blind-separated-low", {}));
    pops.push_back(blind_precision_down());
    pops.push_back(blind_precision_up());
    pops.push_back(single_group_cells());
    pops.push_back(neutral_cell());
    for (long seed = 1; seed <= 10; ++seed)
        pops.push_back(scenario("custom-grid", {{"cells", 3.0}, {"seed", double(seed)}}));

    return pops;
}

} // namespace

const std::vector<PopulationSpec>& corpus_populations() {
    static const std::vector<PopulationSpec> corpus = build();
    return corpus;
}

} // namespace fairlevel
