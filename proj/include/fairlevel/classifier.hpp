#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairlevel/population.hpp"

namespace fairlevel {

// Deployment regime: aware classifiers decide per (cell, group), blind ones per cell.
enum class Regime { aware, blind };

// Fairness notion; fixes the label-conditioning set y* of the target rate:
// DP -> {0,1}, EO -> {1}, PE -> {0}.
enum class Notion { dp, eo, pe };

inline constexpr std::array<Notion, 3> kAllNotions{Notion::dp, Notion::eo, Notion::pe};
inline constexpr std::array<Regime, 2> kAllRegimes{Regime::aware, Regime::blind};

const char* to_string(Regime r);
const char* to_string(Notion n);
Regime regime_from_string(const std::string& s);
Notion notion_from_string(const std::string& s);

inline int notion_index(Notion n) { return static_cast<int>(n); }

// True iff label y belongs to the notion's conditioning set y*.
bool notion_uses_label(Notion n, int label);

// Group slot used for blind decision units.
inline constexpr int kBlindGroup = -1;

// A decision unit: (cell, group) in the aware regime, (cell, kBlindGroup) in the blind one.
struct DecisionUnit {
    CellId cell;
    int group = kBlindGroup;

    auto operator<=>(const DecisionUnit&) const = default;
};

std::string to_string(const DecisionUnit& u);

// Positive-mass decision units of a population under a regime, in canonical order.
std::vector<DecisionUnit> decision_units(const PopulationSpec& pop, Regime regime);

// P(V = u): unit probability mass.
double unit_mass(const PopulationSpec& pop, const DecisionUnit& u);
// P(V = u, Y = label)
double unit_label_mass(const PopulationSpec& pop, const DecisionUnit& u, int label);
// eta(u) = P(Y=1 | V=u); nullopt when the unit has zero mass.
std::optional<double> unit_eta(const PosteriorTables& tables, const DecisionUnit& u);

// A randomized classifier: per decision unit, the probability of predicting 1.
class RandomizedClassifier {
  public:
    RandomizedClassifier() : regime_(Regime::blind) {}
    RandomizedClassifier(Regime regime, std::map<DecisionUnit, double> accept);

    Regime regime() const { return regime_; }
    const std::map<DecisionUnit, double>& accept() const { return accept_; }

    bool covers(const DecisionUnit& u) const { return accept_.count(u) > 0; }
    // Throws CoverageError when the unit is missing.
    double accept_prob(const DecisionUnit& u) const;
    // Acceptance probability experienced by a member of (cell, group); dispatches
    // on the regime. Throws CoverageError when the resolved unit is missing.
    double prob_for(const CellId& cell, int group) const;

    bool operator==(const RandomizedClassifier& other) const = default;

  private:
    Regime regime_;
    std::map<DecisionUnit, double> accept_;
};

// Constant classifiers over the population's units.
RandomizedClassifier accept_all(const PopulationSpec& pop, Regime regime);
RandomizedClassifier reject_all(const PopulationSpec& pop, Regime regime);

// Advantaged / disadvantaged identification for one notion. tie is set when
// |DM| < 1e-12, in which case roles default to (advantaged=1, disadvantaged=0).
struct GroupRoles {
    int advantaged = 1;
    int disadvantaged = 0;
    bool tie = false;
};

// Per-group outcome statistics of a classifier.
struct GroupStats {
    double gsr = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    std::optional<double> precision; // nullopt when P(Yhat=1, S=s) = 0

    // Notion-target rate: the statistic the notion equalizes.
    double ntr(Notion n) const;
};

// Full outcome report: group statistics, cost-sensitive risk at the supplied c,
// signed disparity and group roles per notion.
struct GroupReport {
    double c = 0.5;
    double risk = 0.0;
    std::array<GroupStats, 2> group; // indexed by s
    std::array<double, 3> dm{0.0, 0.0, 0.0};      // indexed by notion_index
    std::array<GroupRoles, 3> roles;              // indexed by notion_index

    double dm_for(Notion n) const { return dm[notion_index(n)]; }
    const GroupRoles& roles_for(Notion n) const { return roles[notion_index(n)]; }
};

// Expected cost-sensitive risk (1-c) P(Yhat=0, Y=1) + c P(Yhat=1, Y=0),
// computed exactly from masses. Throws CoverageError if f misses a unit.
double risk_cs(const RandomizedClassifier& f, const PopulationSpec& pop, double c);

// All group statistics, disparities and roles in one pass.
GroupReport rates(const RandomizedClassifier& f, const PopulationSpec& pop, double c);

// Roles under one notion (argmax / argmin of the notion-target rate).
GroupRoles group_roles(const RandomizedClassifier& f, const PopulationSpec& pop, Notion n);

} // namespace fairlevel
