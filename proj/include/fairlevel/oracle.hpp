#pragma once

#include "fairlevel/classifier.hpp"

namespace fairlevel {

// Brute-force solution of the constrained problem by enumerating product
// randomized classifiers. Independent of the Lagrangian solver: risk and
// disparity are computed straight from their definitions over the masses.
struct OracleResult {
    double best_risk = 0.0;
    RandomizedClassifier best_classifier;
    int grid_resolution = 0;
    long feasible_count = 0; // grid points with |DM| <= delta + 1e-9
};

// Enumerates acceptance probabilities per unit over {0, 1/(g-1), ..., 1}, then
// refines every deterministic corner by solving the single free randomization
// coordinate that lands DM exactly on 0 or +/-delta. Risk and DM are linear in
// the acceptance vector, so an optimum with at most one fractional coordinate
// always exists and the refinement pass is exact.
// Requires: decision units <= 8, 2 <= grid_resolution <= 101.
OracleResult brute_force(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                         double delta, int grid_resolution);

struct CertifyResult {
    bool pass = false;
    double gap = 0.0;          // |solver_risk - oracle_risk|
    double solver_risk = 0.0;
    double oracle_risk = 0.0;
    double solver_lambda = 0.0;
    double solver_dm = 0.0;
    int grid_resolution = 0;
    long feasible_count = 0;
    RandomizedClassifier solver_classifier;
    RandomizedClassifier oracle_classifier;
};

// Pass iff |solver risk - oracle risk| <= 1e-4 * max(1, oracle risk).
// grid_resolution <= 0 selects a resolution from the unit count (101 for <= 2
// units down to 3 for 7-8 units).
CertifyResult certify(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                      double delta, int grid_resolution = 0);

} // namespace fairlevel
