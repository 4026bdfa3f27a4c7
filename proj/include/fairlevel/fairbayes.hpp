#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairlevel/classifier.hpp"

namespace fairlevel {

// Default tolerances. tol_dm is the slack on |DM| <= delta feasibility checks;
// tol_boundary decides when a unit sits on the decision boundary h = 0.
struct SolveOptions {
    double tol_dm = 1e-9;
    double tol_boundary = 1e-12;
};

// The notion- and regime-specific threshold correction nu per decision unit.
//
// Aware regime:
//   nu_DP(x,s) = (2s-1) / P(S=s)
//   nu_EO(x,s) = (2s-1) eta(x,s) / P(S=s, Y=1)
//   nu_PE(x,s) = (2s-1) (1 - eta(x,s)) / P(S=s, Y=0)
// Blind regime:
//   nu_DP(x) = P(S=1|x)/P(S=1) - P(S=0|x)/P(S=0)
//   nu_EO(x) = P(S=1,Y=1|x)/P(S=1,Y=1) - P(S=0,Y=1|x)/P(S=0,Y=1)
//   nu_PE(x) = P(S=1,Y=0|x)/P(S=1,Y=0) - P(S=0,Y=0|x)/P(S=0,Y=0)
struct FairnessCorrection {
    Regime regime = Regime::aware;
    Notion notion = Notion::dp;
    std::map<DecisionUnit, double> nu;
};

FairnessCorrection correction(const PopulationSpec& pop, Notion notion, Regime regime);

// Unconstrained Bayes-optimal classifier: accept(u) = 1 iff eta(u) - c > tol_boundary,
// 0 otherwise (boundary units get 0).
RandomizedClassifier bayes_unconstrained(const PopulationSpec& pop, double c, Regime regime,
                                         double tol_boundary = 1e-12);

// One member of the fair threshold family: with h(u) = eta(u) - c - lambda nu(u),
// accept(u) = 1 if h > tol_boundary, alpha(u) if |h| <= tol_boundary (0 when absent),
// else 0. Throws UsageError for alpha keys off the boundary or outside [0,1].
RandomizedClassifier fair_threshold(const PopulationSpec& pop, double c, Notion notion,
                                    Regime regime, double lambda,
                                    const std::map<DecisionUnit, double>& alpha,
                                    double tol_boundary = 1e-12);

// Result of the constrained solve.
struct FairSolveResult {
    RandomizedClassifier classifier;
    double lambda_star = 0.0;
    std::map<DecisionUnit, double> boundary_alpha; // all boundary units at lambda_star
    double achieved_dm = 0.0;
    double achieved_risk = 0.0;
    double tolerance_delta = 0.0;
    bool already_fair = false; // lambda* = 0 because the unconstrained rule was feasible
};

// Minimum-risk member of the fair threshold family with |DM| <= delta + tol_dm.
//
// Finite supports make DM(lambda) a step function, so the solver enumerates the
// breakpoints zeta(u) = (eta(u) - c) / nu(u), evaluates one candidate per open
// interval and, at each breakpoint, solves the boundary randomization in closed
// form (largest-|nu|-first allocation). Feasible candidates are ranked by risk,
// then |lambda|, then total randomized mass. Throws SolverError if no candidate
// is feasible (cannot happen for valid populations).
FairSolveResult solve(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                      double delta, const SolveOptions& opt = {});

// solve() across an increasing delta grid, with directional checks:
// aware sweeps assert the advantaged rate non-decreasing and the disadvantaged
// rate non-increasing in delta; blind sweeps assert same-direction monotonicity
// when one of the zeta separations holds. Violations are recorded, not dropped.
// Without a separation no direction is guaranteed; a group whose rate crosses
// its unconstrained value in both directions across the sweep is surfaced as an
// observation, not a violation.
struct DeltaSweepResult {
    std::vector<double> deltas;
    std::vector<FairSolveResult> results;
    std::vector<std::string> monotonicity_violations;
    std::vector<std::string> observations;
};

DeltaSweepResult delta_sweep(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                             const std::vector<double>& deltas, const SolveOptions& opt = {});

} // namespace fairlevel
