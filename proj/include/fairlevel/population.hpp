#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fairlevel/errors.hpp"

namespace fairlevel {

// Feature cell identifier. Cells are opaque names; all structure lives in the masses.
using CellId = std::string;

// One atom of the joint distribution: P(X = cell, S = group, Y = label) = mass.
struct MassEntry {
    CellId cell;
    int group = 0; // 0 or 1
    int label = 0; // 0 or 1
    double mass = 0.0;
};

// Tolerance for the mass-sum check. Masses passing it are renormalized to sum
// exactly to 1 so downstream ratios stay clean.
inline constexpr double kMassSumTolerance = 1e-9;

// A finite joint distribution over (X, S, Y). Immutable after construction.
//
// Invariants enforced at construction:
//   - at most one entry per (cell, group, label) triple
//   - every mass >= 0
//   - masses sum to 1 within kMassSumTolerance (then normalized exactly)
//   - non-degeneracy: P(S=s, Y=y) > 0 for all four (s, y) pairs
//
// Zero-mass entries are validated, then dropped; cells() lists positive-mass
// cells only, so "cell absent for a group" and "zero mass for a group" coincide.
class PopulationSpec {
  public:
    static PopulationSpec from_entries(std::string name, std::string description,
                                       std::vector<MassEntry> entries);

    const std::string& name() const { return name_; }
    const std::string& description() const { return description_; }

    // Canonical order: sorted by (cell, group, label). Positive masses only.
    const std::vector<MassEntry>& entries() const { return entries_; }

    // Positive-mass cells, sorted.
    const std::vector<CellId>& cells() const { return cells_; }

    // P(X=cell, S=group, Y=label); 0 when the triple is absent.
    double mass(const CellId& cell, int group, int label) const;
    // P(X=cell)
    double cell_mass(const CellId& cell) const;
    // P(X=cell, S=group)
    double cell_group_mass(const CellId& cell, int group) const;
    // P(X=cell, Y=label)
    double cell_label_mass(const CellId& cell, int label) const;
    // P(S=group)
    double prior_group(int group) const { return prior_group_[check_bit(group)]; }
    // P(S=group, Y=label)
    double prior_group_label(int group, int label) const {
        return prior_group_label_[check_bit(group)][check_bit(label)];
    }
    // P(Y=label)
    double prior_label(int label) const {
        return prior_group_label_[0][check_bit(label)] + prior_group_label_[1][check_bit(label)];
    }

  private:
    PopulationSpec() = default;
    static int check_bit(int v);

    std::string name_;
    std::string description_;
    std::vector<MassEntry> entries_;
    std::vector<CellId> cells_;
    std::map<std::tuple<CellId, int, int>, double> mass_;
    std::array<double, 2> prior_group_{0.0, 0.0};
    std::array<std::array<double, 2>, 2> prior_group_label_{{{0.0, 0.0}, {0.0, 0.0}}};
};

// Posterior and conditional tables derived from a PopulationSpec by exact mass
// ratios. eta_aware holds entries only where P(X=x, S=s) > 0; absent keys mean
// "undefined", never 0.
struct PosteriorTables {
    std::map<CellId, double> eta_blind;                      // P(Y=1 | X=x)
    std::map<std::pair<CellId, int>, double> eta_aware;      // P(Y=1 | X=x, S=s), defined only
    std::map<std::pair<CellId, int>, double> group_given_x;  // P(S=s | X=x)
    std::map<std::tuple<CellId, int, int>, double> joint_given_x; // P(S=s, Y=y | X=x)
    std::array<double, 2> prior_group{0.0, 0.0};
    std::array<std::array<double, 2>, 2> prior_group_label{{{0.0, 0.0}, {0.0, 0.0}}};

    // Undefined (zero-mass (x,s)) comes back as nullopt.
    std::optional<double> eta(const CellId& cell, int group) const;
};

PosteriorTables derive_posteriors(const PopulationSpec& spec);

// Parse and validate the .pop.json document format:
//   {"name": str, "description": str, "cells": [{"x": str, "s": 0|1, "y": 0|1, "p": num}, ...]}
PopulationSpec load_population(const std::string& document);

// Read a .pop.json file from disk.
PopulationSpec load_population_file(const std::string& path);

// Serialize back to the document format (canonical entry order, so the
// round-trip is stable).
std::string population_to_document(const PopulationSpec& spec);

// Built-in population families. Known names:
//   two-point-aware      params: eta1 (0.9), eta0 (0.3), p1 (0.5)
//   symmetric-null       params: eta_hi (0.8), eta_lo (0.2)
//   blind-separated-high no params; 3 cells tuned so A_max <= B_min for DP at c=0.5
//   blind-separated-low  no params; 3 cells tuned so B_max < A_min for DP at c=0.5
//   custom-grid          params: cells (3), seed (1); deterministic generated population
// Unknown names and unknown/out-of-range parameters throw UsageError.
PopulationSpec scenario(const std::string& name, const std::map<std::string, double>& params);

} // namespace fairlevel
