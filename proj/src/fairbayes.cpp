#include "fairlevel/fairbayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairlevel/log.hpp"

namespace fairlevel {

FairnessCorrection correction(const PopulationSpec& pop, Notion notion, Regime regime) {
    const PosteriorTables t = derive_posteriors(pop);
    FairnessCorrection corr;
    corr.regime = regime;
    corr.notion = notion;

    for (const auto& u : decision_units(pop, regime)) {
        double nu = 0.0;
        if (regime == Regime::aware) {
            const int s = u.group;
            const double sign = 2.0 * s - 1.0;
            const double eta = *t.eta(u.cell, s); // defined: positive-mass unit
            switch (notion) {
                case Notion::dp: nu = sign / t.prior_group[s]; break;
                case Notion::eo: nu = sign * eta / t.prior_group_label[s][1]; break;
                case Notion::pe: nu = sign * (1.0 - eta) / t.prior_group_label[s][0]; break;
            }
        } else {
            switch (notion) {
                case Notion::dp:
                    nu = t.group_given_x.at({u.cell, 1}) / t.prior_group[1] -
                         t.group_given_x.at({u.cell, 0}) / t.prior_group[0];
                    break;
                case Notion::eo:
                    nu = t.joint_given_x.at({u.cell, 1, 1}) / t.prior_group_label[1][1] -
                         t.joint_given_x.at({u.cell, 0, 1}) / t.prior_group_label[0][1];
                    break;
                case Notion::pe:
                    nu = t.joint_given_x.at({u.cell, 1, 0}) / t.prior_group_label[1][0] -
                         t.joint_given_x.at({u.cell, 0, 0}) / t.prior_group_label[0][0];
                    break;
            }
        }
        corr.nu[u] = nu;
    }
    return corr;
}

RandomizedClassifier bayes_unconstrained(const PopulationSpec& pop, double c, Regime regime,
                                         double tol_boundary) {
    if (!(c >= 0.0 && c <= 1.0)) throw UsageError("cost c must lie in [0, 1]");
    const PosteriorTables t = derive_posteriors(pop);
    std::map<DecisionUnit, double> accept;
    for (const auto& u : decision_units(pop, regime)) {
        const double h = *unit_eta(t, u) - c;
        accept[u] = h > tol_boundary ? 1.0 : 0.0;
    }
    if (regime == Regime::aware) {
        for (const auto& cell : pop.cells())
            for (int s = 0; s < 2; ++s)
                if (pop.cell_group_mass(cell, s) == 0.0)
                    log_debug("unit (" + cell + ", s=" + std::to_string(s) +
                              ") has zero mass; eta undefined, excluded from the decision family");
    }
    return {regime, std::move(accept)};
}

RandomizedClassifier fair_threshold(const PopulationSpec& pop, double c, Notion notion,
                                    Regime regime, double lambda,
                                    const std::map<DecisionUnit, double>& alpha,
                                    double tol_boundary) {
    const PosteriorTables t = derive_posteriors(pop);
    const FairnessCorrection corr = correction(pop, notion, regime);

    std::map<DecisionUnit, double> accept;
    for (const auto& u : decision_units(pop, regime)) {
        const double h = *unit_eta(t, u) - c - lambda * corr.nu.at(u);
        if (h > tol_boundary) {
            accept[u] = 1.0;
        } else if (std::fabs(h) <= tol_boundary) {
            auto it = alpha.find(u);
            accept[u] = it == alpha.end() ? 0.0 : it->second;
        } else {
            accept[u] = 0.0;
        }
    }
    for (const auto& [u, a] : alpha) {
        if (!(a >= 0.0 && a <= 1.0))
            throw UsageError("alpha for unit " + to_string(u) + " is outside [0, 1]");
        auto eta = unit_eta(t, u);
        if (!eta) throw UsageError("alpha on unknown unit " + to_string(u));
        const double h = *eta - c - lambda * corr.nu.at(u);
        if (std::fabs(h) > tol_boundary)
            throw UsageError("alpha on non-boundary unit " + to_string(u));
    }
    return {regime, std::move(accept)};
}

namespace {

struct UnitInfo {
    DecisionUnit unit;
    double eta = 0.0;
    double nu = 0.0;
    double mass = 0.0;
    double mass_y1 = 0.0;
    double mass_y0 = 0.0;
    // DM increment of accepting this unit outright.
    double dm_delta = 0.0;
};

struct Candidate {
    double lambda = 0.0;
    std::map<DecisionUnit, double> alpha;
    double risk = 0.0;
    double dm = 0.0;
    double randomized_mass = 0.0;
    bool valid = false;
};

// Risk and DM of an acceptance assignment, straight from the unit table.
void evaluate(const std::vector<UnitInfo>& units, const std::vector<double>& accept, double c,
              double label1_total, double& risk, double& dm) {
    risk = (1.0 - c) * label1_total;
    dm = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        risk += accept[i] * (c * units[i].mass_y0 - (1.0 - c) * units[i].mass_y1);
        dm += accept[i] * units[i].dm_delta;
    }
}

} // namespace

FairSolveResult solve(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                      double delta, const SolveOptions& opt) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw UsageError("delta must lie in [0, 1]");
    if (!(c >= 0.0 && c <= 1.0)) throw UsageError("cost c must lie in [0, 1]");

    const RandomizedClassifier fstar = bayes_unconstrained(pop, c, regime, opt.tol_boundary);
    const GroupReport star_report = rates(fstar, pop, c);
    const double dm_star = star_report.dm_for(notion);
    if (std::fabs(dm_star) <= delta + opt.tol_dm) {
        return {fstar, 0.0, {}, dm_star, star_report.risk, delta, true};
    }

    const PosteriorTables tables = derive_posteriors(pop);
    const FairnessCorrection corr = correction(pop, notion, regime);

    std::vector<UnitInfo> units;
    double label1_total = 0.0;
    for (const auto& u : decision_units(pop, regime)) {
        UnitInfo info;
        info.unit = u;
        info.eta = *unit_eta(tables, u);
        info.nu = corr.nu.at(u);
        info.mass = unit_mass(pop, u);
        info.mass_y1 = unit_label_mass(pop, u, 1);
        info.mass_y0 = unit_label_mass(pop, u, 0);
        label1_total += info.mass_y1;
        // Accepting u moves Rate_s by its share of the notion-conditioned mass.
        double d = 0.0;
        for (int s = 0; s < 2; ++s) {
            double w = 0.0;
            for (int y = 0; y < 2; ++y) {
                if (!notion_uses_label(notion, y)) continue;
                if (u.group == kBlindGroup)
                    w += pop.mass(u.cell, s, y);
                else if (u.group == s)
                    w += pop.mass(u.cell, s, y);
            }
            double denom = 0.0;
            for (int y = 0; y < 2; ++y)
                if (notion_uses_label(notion, y)) denom += pop.prior_group_label(s, y);
            d += (s == 1 ? 1.0 : -1.0) * w / denom;
        }
        info.dm_delta = d;
        units.push_back(info);
    }
    const std::size_t n = units.size();

    // Breakpoints: lambda values where some unit's h changes sign.
    std::vector<double> breakpoints;
    for (const auto& info : units)
        if (std::fabs(info.nu) > opt.tol_boundary)
            breakpoints.push_back((info.eta - c) / info.nu);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> reps; // clustered representatives
    for (double b : breakpoints)
        if (reps.empty() || b - reps.back() > opt.tol_boundary) reps.push_back(b);

    // Candidate lambdas for the open intervals between (and beyond) breakpoints.
    std::vector<double> interval_lambdas;
    auto add_interior = [&](double lo, double hi) {
        const double margin = 10.0 * opt.tol_boundary;
        if (lo < -margin && hi > margin)
            interval_lambdas.push_back(0.0);
        else
            interval_lambdas.push_back(0.5 * (lo + hi));
    };
    if (reps.empty()) {
        interval_lambdas.push_back(0.0);
    } else {
        interval_lambdas.push_back(reps.front() - 1.0);
        for (std::size_t i = 0; i + 1 < reps.size(); ++i) add_interior(reps[i], reps[i + 1]);
        interval_lambdas.push_back(reps.back() + 1.0);
    }

    auto base_accept = [&](double lambda, std::vector<double>& accept,
                           std::vector<std::size_t>& boundary) {
        accept.assign(n, 0.0);
        boundary.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const double h = units[i].eta - c - lambda * units[i].nu;
            if (h > opt.tol_boundary)
                accept[i] = 1.0;
            else if (std::fabs(h) <= opt.tol_boundary)
                boundary.push_back(i);
        }
    };

    std::vector<Candidate> candidates;

    std::vector<double> accept;
    std::vector<std::size_t> boundary;
    for (double lambda : interval_lambdas) {
        base_accept(lambda, accept, boundary);
        Candidate cand;
        cand.lambda = lambda;
        evaluate(units, accept, c, label1_total, cand.risk, cand.dm);
        cand.valid = std::fabs(cand.dm) <= delta + opt.tol_dm;
        if (cand.valid) candidates.push_back(std::move(cand));
    }

    for (double lambda : reps) {
        base_accept(lambda, accept, boundary);
        if (boundary.empty()) continue;

        double dm0, risk0;
        evaluate(units, accept, c, label1_total, risk0, dm0);

        // Achievable DM adjustment through boundary randomization.
        double t_min = 0.0, t_max = 0.0;
        for (std::size_t i : boundary) {
            const double d = units[i].dm_delta;
            if (d > 0.0) t_max += d;
            if (d < 0.0) t_min += d;
        }
        const double f_lo = std::max(t_min, -delta - dm0);
        const double f_hi = std::min(t_max, delta - dm0);
        if (f_lo > f_hi + 1e-15) continue; // no feasible randomization here

        // Boundary risk prices are -lambda * dm_delta, so the risk-optimal target
        // is the feasible end in lambda's direction; at lambda = 0 randomization
        // is risk-free and the least-randomized feasible point is used.
        double target;
        if (lambda > 0.0)
            target = f_hi;
        else if (lambda < 0.0)
            target = f_lo;
        else
            target = std::clamp(0.0, f_lo, f_hi);

        // Allocate: largest |nu| first, ties by unit order (cell, then group).
        std::vector<std::size_t> order(boundary.begin(), boundary.end());
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::fabs(units[a].nu) > std::fabs(units[b].nu);
        });
        std::map<DecisionUnit, double> alpha;
        for (std::size_t i : boundary) alpha[units[i].unit] = 0.0;
        double remaining = target;
        for (std::size_t i : order) {
            const double d = units[i].dm_delta;
            if (remaining > 1e-15 && d > 0.0) {
                const double a = std::min(1.0, remaining / d);
                alpha[units[i].unit] = a;
                accept[i] = a;
                remaining -= a * d;
            } else if (remaining < -1e-15 && d < 0.0) {
                const double a = std::min(1.0, remaining / d);
                alpha[units[i].unit] = a;
                accept[i] = a;
                remaining -= a * d;
            }
        }

        Candidate cand;
        cand.lambda = lambda;
        cand.alpha = std::move(alpha);
        evaluate(units, accept, c, label1_total, cand.risk, cand.dm);
        cand.valid = std::fabs(cand.dm) <= delta + opt.tol_dm;
        if (!cand.valid) continue;
        for (std::size_t i : boundary)
            if (accept[i] > 0.0 && accept[i] < 1.0) cand.randomized_mass += units[i].mass;
        candidates.push_back(std::move(cand));
    }

    if (candidates.empty())
        throw SolverError("no feasible (lambda, alpha) candidate found for " +
                          std::string(to_string(notion)) + "/" + to_string(regime) +
                          " at delta=" + std::to_string(delta));

    const Candidate* best = &candidates.front();
    for (const auto& cand : candidates) {
        auto key = [](const Candidate& k) {
            return std::tuple<double, double, double, double>(k.risk, std::fabs(k.lambda),
                                                              k.randomized_mass, k.lambda);
        };
        if (key(cand) < key(*best)) best = &cand;
    }

    std::map<DecisionUnit, double> accept_map;
    base_accept(best->lambda, accept, boundary);
    for (std::size_t i = 0; i < n; ++i) accept_map[units[i].unit] = accept[i];
    for (const auto& [u, a] : best->alpha) accept_map[u] = a;

    FairSolveResult result{RandomizedClassifier(regime, std::move(accept_map)),
                           best->lambda,
                           best->alpha,
                           0.0,
                           0.0,
                           delta,
                           false};
    const GroupReport rep = rates(result.classifier, pop, c);
    result.achieved_dm = rep.dm_for(notion);
    result.achieved_risk = rep.risk;
    log_debug("solve " + std::string(to_string(notion)) + "/" + to_string(regime) + " delta=" +
              std::to_string(delta) + ": lambda*=" + std::to_string(result.lambda_star) +
              " risk=" + std::to_string(result.achieved_risk));
    return result;
}

DeltaSweepResult delta_sweep(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                             const std::vector<double>& deltas, const SolveOptions& opt) {
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] > deltas[i - 1]))
            throw UsageError("delta grid must be strictly increasing");

    DeltaSweepResult sweep;
    sweep.deltas = deltas;
    for (double d : deltas) sweep.results.push_back(solve(pop, c, notion, regime, d, opt));

    const RandomizedClassifier fstar = bayes_unconstrained(pop, c, regime, opt.tol_boundary);
    const GroupRoles roles = rates(fstar, pop, c).roles_for(notion);

    std::array<std::vector<double>, 2> ntr;
    for (const auto& r : sweep.results) {
        const GroupReport rep = rates(r.classifier, pop, c);
        for (int s = 0; s < 2; ++s) ntr[s].push_back(rep.group[s].ntr(notion));
    }

    const double slack = 1e-9;
    auto check_monotone = [&](int s, bool non_decreasing, const std::string& why) {
        for (std::size_t i = 1; i < deltas.size(); ++i) {
            const double prev = ntr[s][i - 1];
            const double cur = ntr[s][i];
            const bool ok = non_decreasing ? cur >= prev - slack : cur <= prev + slack;
            if (!ok)
                sweep.monotonicity_violations.push_back(
                    why + ": group " + std::to_string(s) + " NTR moved from " +
                    std::to_string(prev) + " to " + std::to_string(cur) + " between delta=" +
                    std::to_string(deltas[i - 1]) + " and delta=" + std::to_string(deltas[i]));
        }
    };

    if (regime == Regime::aware) {
        check_monotone(roles.advantaged, true, "aware advantaged rate must be non-decreasing");
        check_monotone(roles.disadvantaged, false,
                       "aware disadvantaged rate must be non-increasing");
    } else {
        // Separations are delta-independent: compare the zeta extrema once.
        const FairnessCorrection corr = correction(pop, notion, regime);
        const PosteriorTables tables = derive_posteriors(pop);
        double a_max = -std::numeric_limits<double>::infinity();
        double b_max = -std::numeric_limits<double>::infinity();
        double a_min = std::numeric_limits<double>::infinity();
        double b_min = std::numeric_limits<double>::infinity();
        for (const auto& [u, nu] : corr.nu) {
            if (std::fabs(nu) <= opt.tol_boundary) continue;
            const double z = (*unit_eta(tables, u) - c) / nu;
            if (nu > 0.0) {
                a_max = std::max(a_max, z);
                a_min = std::min(a_min, z);
            } else {
                b_max = std::max(b_max, z);
                b_min = std::min(b_min, z);
            }
        }
        if (a_max <= b_min + 1e-12) {
            for (int s = 0; s < 2; ++s)
                check_monotone(s, true, "blind rate must be non-decreasing (A_max <= B_min)");
        } else if (b_max < a_min - 1e-12) {
            for (int s = 0; s < 2; ++s)
                check_monotone(s, false, "blind rate must be non-increasing (B_max < A_min)");
        } else {
            // No separation: direction is not pinned down. Surface rates that
            // cross their unconstrained value in both directions.
            const GroupReport star = rates(fstar, pop, c);
            for (int s = 0; s < 2; ++s) {
                const double base = star.group[s].ntr(notion);
                bool above = false, below = false;
                for (double v : ntr[s]) {
                    above = above || v > base + 1e-9;
                    below = below || v < base - 1e-9;
                }
                if (above && below)
                    sweep.observations.push_back(
                        "group " + std::to_string(s) +
                        " NTR crosses its unconstrained value in both directions across the "
                        "sweep (no separation holds)");
            }
        }
    }
    return sweep;
}

} // namespace fairlevel
