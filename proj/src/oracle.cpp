#include "fairlevel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairlevel/fairbayes.hpp"

namespace fairlevel {

namespace {

// Per-unit quantities needed to price a product classifier. DM is computed from
// the rate definition (notion-conditioned accepted mass over the group's
// notion-conditioned mass), not from the solver's correction terms.
struct OracleUnit {
    DecisionUnit unit;
    double mass_y1 = 0.0;
    double mass_y0 = 0.0;
    double dm_delta = 0.0;
};

struct Workspace {
    std::vector<OracleUnit> units;
    double label1_total = 0.0;
    double c = 0.5;
    double delta = 0.0;

    double risk(const std::vector<double>& a) const {
        double r = (1.0 - c) * label1_total;
        for (std::size_t i = 0; i < units.size(); ++i)
            r += a[i] * (c * units[i].mass_y0 - (1.0 - c) * units[i].mass_y1);
        return r;
    }
    double dm(const std::vector<double>& a) const {
        double d = 0.0;
        for (std::size_t i = 0; i < units.size(); ++i) d += a[i] * units[i].dm_delta;
        return d;
    }
    bool feasible(double d) const { return std::fabs(d) <= delta + 1e-9; }
};

Workspace make_workspace(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                         double delta) {
    Workspace w;
    w.c = c;
    w.delta = delta;
    for (const auto& u : decision_units(pop, regime)) {
        OracleUnit info;
        info.unit = u;
        info.mass_y1 = unit_label_mass(pop, u, 1);
        info.mass_y0 = unit_label_mass(pop, u, 0);
        w.label1_total += info.mass_y1;

        double d = 0.0;
        for (int s = 0; s < 2; ++s) {
            double num = 0.0, den = 0.0;
            for (int y = 0; y < 2; ++y) {
                if (!notion_uses_label(notion, y)) continue;
                den += pop.prior_group_label(s, y);
                if (u.group == kBlindGroup || u.group == s) num += pop.mass(u.cell, s, y);
            }
            d += (s == 1 ? 1.0 : -1.0) * num / den;
        }
        info.dm_delta = d;
        w.units.push_back(info);
    }
    return w;
}

struct Best {
    bool found = false;
    double risk = 0.0;
    std::vector<double> accept;

    void offer(double r, const std::vector<double>& a) {
        if (!found || r < risk - 1e-15 ||
            (std::fabs(r - risk) <= 1e-15 && std::lexicographical_compare(a.begin(), a.end(),
                                                                          accept.begin(),
                                                                          accept.end()))) {
            found = true;
            risk = r;
            accept = a;
        }
    }
};

} // namespace

OracleResult brute_force(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                         double delta, int grid_resolution) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw UsageError("delta must lie in [0, 1]");
    if (grid_resolution < 2 || grid_resolution > 101)
        throw UsageError("grid_resolution must lie in [2, 101]");

    Workspace w = make_workspace(pop, c, notion, regime, delta);
    const std::size_t n = w.units.size();
    if (n > 8)
        throw UsageError("too many decision units for brute force: " + std::to_string(n) +
                         " (limit 8)");

    Best best;
    long feasible_count = 0;

    // Grid sweep over {0, 1/(g-1), ..., 1}^n.
    std::vector<int> idx(n, 0);
    std::vector<double> a(n, 0.0);
    const double step = 1.0 / (grid_resolution - 1);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) a[i] = idx[i] * step;
        const double d = w.dm(a);
        if (w.feasible(d)) {
            ++feasible_count;
            best.offer(w.risk(a), a);
        }
        std::size_t k = 0;
        while (k < n && ++idx[k] == grid_resolution) idx[k++] = 0;
        if (k == n) break;
    }

    // Refinement: every deterministic corner with one free coordinate moved to
    // land DM exactly on a constraint target.
    std::vector<double> targets;
    if (delta > 0.0) {
        targets = {-delta, 0.0, delta};
    } else {
        targets = {0.0};
    }
    std::vector<double> corner(n, 0.0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) corner[i] = (mask >> i) & 1 ? 1.0 : 0.0;
        const double dm_corner = w.dm(corner);
        if (w.feasible(dm_corner)) best.offer(w.risk(corner), corner);
        for (std::size_t i = 0; i < n; ++i) {
            const double d_i = w.units[i].dm_delta;
            if (std::fabs(d_i) < 1e-15) continue;
            const double dm_without = dm_corner - corner[i] * d_i;
            for (double target : targets) {
                const double ai = (target - dm_without) / d_i;
                if (ai < -1e-12 || ai > 1.0 + 1e-12) continue;
                std::vector<double> probe = corner;
                probe[i] = std::clamp(ai, 0.0, 1.0);
                const double d = w.dm(probe);
                if (w.feasible(d)) best.offer(w.risk(probe), probe);
            }
        }
    }

    if (!best.found)
        throw SolverError("oracle found no feasible point; accept-all should always be feasible");

    std::map<DecisionUnit, double> accept;
    for (std::size_t i = 0; i < n; ++i) accept[w.units[i].unit] = best.accept[i];
    return {best.risk, RandomizedClassifier(regime, std::move(accept)), grid_resolution,
            feasible_count};
}

CertifyResult certify(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                      double delta, int grid_resolution) {
    if (grid_resolution <= 0) {
        const std::size_t n = decision_units(pop, regime).size();
        if (n <= 2)
            grid_resolution = 101;
        else if (n == 3)
            grid_resolution = 31;
        else if (n == 4)
            grid_resolution = 13;
        else if (n == 5)
            grid_resolution = 7;
        else if (n == 6)
            grid_resolution = 5;
        else
            grid_resolution = 3;
    }

    const FairSolveResult solved = solve(pop, c, notion, regime, delta);
    const OracleResult oracle = brute_force(pop, c, notion, regime, delta, grid_resolution);

    CertifyResult out;
    out.solver_risk = solved.achieved_risk;
    out.oracle_risk = oracle.best_risk;
    out.gap = std::fabs(out.solver_risk - out.oracle_risk);
    out.pass = out.gap <= 1e-4 * std::max(1.0, out.oracle_risk);
    out.solver_lambda = solved.lambda_star;
    out.solver_dm = solved.achieved_dm;
    out.grid_resolution = grid_resolution;
    out.feasible_count = oracle.feasible_count;
    out.solver_classifier = solved.classifier;
    out.oracle_classifier = oracle.best_classifier;
    return out;
}

} // namespace fairlevel
