#include "fairlevel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fairlevel/reporting.hpp"

namespace fairlevel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSignTol = 1e-12;
constexpr double kSlack = 1e-9; // absorbs boundary-randomization arithmetic
} // namespace

bool RegionPartition::separation_high_le_low() const { return a_max <= b_min + kSignTol; }
bool RegionPartition::separation_low_lt_high() const { return b_max < a_min - kSignTol; }

RegionPartition partition(const PopulationSpec& pop, double c, Notion notion,
                          const FairSolveResult& solved) {
    if (solved.classifier.regime() != Regime::blind)
        throw UsageError("partition is defined for blind-regime solve results only");

    const PosteriorTables tables = derive_posteriors(pop);
    const FairnessCorrection corr = correction(pop, notion, Regime::blind);

    RegionPartition part;
    part.notion = notion;
    part.cost = c;
    part.lambda_star = solved.lambda_star;
    part.a_max = -kInf;
    part.b_max = -kInf;
    part.a_min = kInf;
    part.b_min = kInf;

    for (const auto& cell : pop.cells()) {
        const double nu = corr.nu.at({cell, kBlindGroup});
        const double lam_nu = solved.lambda_star * nu;
        if (lam_nu > kSignTol)
            part.q_high.insert(cell);
        else if (lam_nu < -kSignTol)
            part.q_low.insert(cell);
        else
            part.q_neutral.insert(cell);

        if (std::fabs(nu) > kSignTol) {
            const double zeta = (tables.eta_blind.at(cell) - c) / nu;
            part.zeta[cell] = zeta;
            if (nu > 0.0) {
                part.a_max = std::max(part.a_max, zeta);
                part.a_min = std::min(part.a_min, zeta);
            } else {
                part.b_max = std::max(part.b_max, zeta);
                part.b_min = std::min(part.b_min, zeta);
            }
        }
    }
    return part;
}

const char* to_string(Pattern p) {
    switch (p) {
        case Pattern::both_down: return "both-down";
        case Pattern::both_up: return "both-up";
        case Pattern::opposite: return "opposite";
        case Pattern::no_change: return "no-change";
        case Pattern::mixed: return "mixed";
    }
    return "?";
}

const char* to_string(SeparationCase s) {
    switch (s) {
        case SeparationCase::high_le_low: return "a_max<=b_min";
        case SeparationCase::low_lt_high: return "b_max<a_min";
        case SeparationCase::both: return "both";
        case SeparationCase::neither: return "neither";
    }
    return "?";
}

const char* to_string(AuditStatus s) {
    switch (s) {
        case AuditStatus::verified: return "verified";
        case AuditStatus::violated: return "violated";
        case AuditStatus::not_applicable: return "not-applicable";
    }
    return "?";
}

namespace {

SeparationCase separation_case(const RegionPartition& part) {
    const bool high = part.separation_high_le_low();
    const bool low = part.separation_low_lt_high();
    if (high && low) return SeparationCase::both;
    if (high) return SeparationCase::high_le_low;
    if (low) return SeparationCase::low_lt_high;
    return SeparationCase::neither;
}

int sign_with_tol(double v) {
    if (v > kSignTol) return 1;
    if (v < -kSignTol) return -1;
    return 0;
}

} // namespace

PatternVerdict classify_pattern(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                                double delta, const SolveOptions& opt) {
    const FairSolveResult solved = solve(pop, c, notion, regime, delta, opt);
    const RandomizedClassifier fstar = bayes_unconstrained(pop, c, regime, opt.tol_boundary);
    const GroupReport rep_star = rates(fstar, pop, c);
    const GroupReport rep_fair = rates(solved.classifier, pop, c);

    PatternVerdict verdict;
    verdict.roles = rep_star.roles_for(notion);
    verdict.lambda_star = solved.lambda_star;
    for (int s = 0; s < 2; ++s)
        verdict.ntr_delta[s] = rep_fair.group[s].ntr(notion) - rep_star.group[s].ntr(notion);

    const int adv = verdict.roles.advantaged;
    const int dis = verdict.roles.disadvantaged;
    const int sa = sign_with_tol(verdict.ntr_delta[adv]);
    const int sd = sign_with_tol(verdict.ntr_delta[dis]);
    if (sa == 0 && sd == 0)
        verdict.pattern = Pattern::no_change;
    else if (sa < 0 && sd < 0)
        verdict.pattern = Pattern::both_down;
    else if (sa > 0 && sd > 0)
        verdict.pattern = Pattern::both_up;
    else if (sa <= 0 && sd >= 0)
        verdict.pattern = Pattern::opposite;
    else
        verdict.pattern = Pattern::mixed;

    if (regime == Regime::aware) {
        verdict.separation = SeparationCase::neither;
        // Opposite-direction redistribution must hold on every valid population.
        if (verdict.ntr_delta[adv] > kSlack)
            verdict.assertion_failures.push_back("advantaged NTR increased by " +
                                                 std::to_string(verdict.ntr_delta[adv]));
        if (verdict.ntr_delta[dis] < -kSlack)
            verdict.assertion_failures.push_back("disadvantaged NTR decreased by " +
                                                 std::to_string(verdict.ntr_delta[dis]));
    } else {
        const RegionPartition part = partition(pop, c, notion, solved);
        verdict.separation = separation_case(part);
        if (part.separation_high_le_low()) {
            for (int s = 0; s < 2; ++s)
                if (verdict.ntr_delta[s] > kSlack)
                    verdict.assertion_failures.push_back(
                        "A_max <= B_min but group " + std::to_string(s) + " NTR increased by " +
                        std::to_string(verdict.ntr_delta[s]));
        }
        if (part.separation_low_lt_high()) {
            for (int s = 0; s < 2; ++s)
                if (verdict.ntr_delta[s] < -kSlack)
                    verdict.assertion_failures.push_back(
                        "B_max < A_min but group " + std::to_string(s) + " NTR decreased by " +
                        std::to_string(verdict.ntr_delta[s]));
        }
    }
    return verdict;
}

MaskedMassReport masked_mass(const PopulationSpec& pop, const RegionPartition& part) {
    MaskedMassReport report;
    // The region's apparent group: positive nu leans group 1, so with
    // lambda* > 0 the advantaged-like side looks like group 1, else group 0.
    const int apparent_high = part.lambda_star >= 0.0 ? 1 : 0;

    auto fill = [&](const std::set<CellId>& region, int apparent,
                    MaskedMassReport::RegionMass& out) {
        out.apparent_group = apparent;
        for (const auto& cell : region)
            for (int s = 0; s < 2; ++s) out.group_mass[s] += pop.cell_group_mass(cell, s);
        out.total = out.group_mass[0] + out.group_mass[1];
        if (out.total > 0.0) out.masked_fraction = out.group_mass[1 - apparent] / out.total;
    };
    fill(part.q_high, apparent_high, report.q_high);
    fill(part.q_low, 1 - apparent_high, report.q_low);
    return report;
}

bool order_aligned(const std::map<CellId, double>& g, const std::map<CellId, double>& h,
                   const std::set<CellId>& region, double tol) {
    for (const auto& cell : region) {
        if (g.find(cell) == g.end())
            throw UsageError("order_aligned: g undefined on region cell '" + cell + "'");
        if (h.find(cell) == h.end())
            throw UsageError("order_aligned: h undefined on region cell '" + cell + "'");
    }
    for (const auto& x : region) {
        for (const auto& xp : region) {
            if (g.at(x) <= g.at(xp) + tol && !(h.at(x) <= h.at(xp) + tol)) return false;
        }
    }
    return true;
}

PrecisionCaseVerdict precision_cases(const PopulationSpec& pop, double c, Notion notion,
                                     double delta, int group, const SolveOptions& opt) {
    if (group != 0 && group != 1) throw UsageError("group must be 0 or 1");

    const FairSolveResult solved = solve(pop, c, notion, Regime::blind, delta, opt);
    const RandomizedClassifier fstar = bayes_unconstrained(pop, c, Regime::blind,
                                                           opt.tol_boundary);
    const GroupReport rep_star = rates(fstar, pop, c);
    const GroupReport rep_fair = rates(solved.classifier, pop, c);
    const RegionPartition part = partition(pop, c, notion, solved);
    const PosteriorTables tables = derive_posteriors(pop);

    PrecisionCaseVerdict verdict;
    verdict.separation = separation_case(part);
    verdict.precision_unconstrained = rep_star.group[group].precision;
    verdict.precision_fair = rep_fair.group[group].precision;
    verdict.precision_defined =
        verdict.precision_unconstrained.has_value() && verdict.precision_fair.has_value();
    if (!verdict.precision_defined) return verdict;

    const int sh = rep_star.roles_for(notion).advantaged;
    const double orient = 2.0 * sh - 1.0;

    // The continuous setting behind the precision cases has a null neutral
    // region (nu(X) admits a density, so P(nu = 0) = 0). With flips present,
    // group-s selected mass on neutral cells can pull the precision either way,
    // so the cases only apply when that mass vanishes.
    if (solved.lambda_star != 0.0) {
        double neutral_selected = 0.0;
        for (const auto& cell : part.q_neutral)
            neutral_selected += pop.cell_group_mass(cell, group) * fstar.prob_for(cell, group);
        if (neutral_selected > 0.0) return verdict;
    }

    // eta_s over region cells where it is defined; zeta restricted to match.
    auto region_maps = [&](const std::set<CellId>& region) {
        std::set<CellId> cells;
        std::map<CellId, double> eta_s, zeta;
        for (const auto& cell : region) {
            auto eta = tables.eta(cell, group);
            if (!eta) continue;
            auto zit = part.zeta.find(cell);
            if (zit == part.zeta.end()) continue;
            cells.insert(cell);
            eta_s[cell] = *eta;
            zeta[cell] = zit->second;
        }
        return std::tuple(cells, eta_s, zeta);
    };
    auto oriented = [&](const std::map<CellId, double>& m, double sign) {
        std::map<CellId, double> out;
        for (const auto& [k, v] : m) out[k] = sign * v;
        return out;
    };
    auto range_over = [&](const std::set<CellId>& region) {
        double lo = kInf, hi = -kInf;
        for (const auto& cell : region) {
            auto eta = tables.eta(cell, group);
            if (!eta) continue;
            lo = std::min(lo, *eta);
            hi = std::max(hi, *eta);
        }
        return std::pair(lo, hi); // (inf, sup); empty -> (+inf, -inf)
    };

    if (part.separation_high_le_low()) {
        auto [cells, eta_s, zeta] = region_maps(part.q_high);
        verdict.deletion_aligned = order_aligned(zeta, oriented(eta_s, orient), cells);
        verdict.deletion_antialigned = order_aligned(zeta, oriented(eta_s, -orient), cells);
    }
    if (part.separation_low_lt_high()) {
        auto [cells, eta_s, zeta] = region_maps(part.q_low);
        const auto [high_inf, high_sup] = range_over(part.q_high);
        const auto [low_inf, low_sup] = range_over(part.q_low);
        const bool entrants_above = high_sup <= low_inf + kSignTol;
        const bool entrants_below = low_sup <= high_inf + kSignTol;
        verdict.addition_aligned =
            entrants_above && order_aligned(zeta, oriented(eta_s, orient), cells);
        verdict.addition_antialigned =
            entrants_below && order_aligned(zeta, oriented(eta_s, -orient), cells);
    }

    const double before = *verdict.precision_unconstrained;
    const double after = *verdict.precision_fair;
    auto require = [&](bool up, const std::string& which) {
        const bool ok = up ? after >= before - kSlack : after <= before + kSlack;
        if (!ok) {
            verdict.directions_hold = false;
            verdict.failures.push_back(which + ": precision moved from " + std::to_string(before) +
                                       " to " + std::to_string(after));
        }
    };
    if (verdict.deletion_aligned) require(true, "deletion-aligned case expects increase");
    if (verdict.deletion_antialigned) require(false, "deletion-antialigned case expects decrease");
    if (verdict.addition_aligned) require(true, "addition-aligned case expects increase");
    if (verdict.addition_antialigned) require(false, "addition-antialigned case expects decrease");
    return verdict;
}

// ---------------------------------------------------------------------------
// Audit

namespace {

std::string witness(const PopulationSpec& pop) { return population_to_document(pop); }

AuditEntry make_entry(const std::string& claim, Regime regime, Notion notion,
                      std::optional<double> delta, AuditStatus status, std::string detail,
                      const PopulationSpec& pop) {
    AuditEntry e;
    e.claim = claim;
    e.regime = regime;
    e.notion = notion;
    e.delta = delta;
    e.status = status;
    e.detail = std::move(detail);
    if (status == AuditStatus::violated) e.witness_json = witness(pop);
    return e;
}

// Aware thresholds shift weakly up for the advantaged group
// and weakly down for the disadvantaged one, equality on both sides iff lambda*=0.
AuditEntry audit_threshold_shift(const PopulationSpec& pop, double c, Notion notion, double delta,
                       const SolveOptions& opt) {
    const FairSolveResult solved = solve(pop, c, notion, Regime::aware, delta, opt);
    const GroupRoles roles =
        rates(bayes_unconstrained(pop, c, Regime::aware, opt.tol_boundary), pop, c)
            .roles_for(notion);
    const FairnessCorrection corr = correction(pop, notion, Regime::aware);

    bool ok = true;
    double max_shift = 0.0;
    std::ostringstream detail;
    for (const auto& [u, nu] : corr.nu) {
        const double shift = solved.lambda_star * nu;
        max_shift = std::max(max_shift, std::fabs(shift));
        if (u.group == roles.advantaged && shift < -kSignTol) ok = false;
        if (u.group == roles.disadvantaged && shift > kSignTol) ok = false;
    }
    // Equality on both sides iff lambda* = 0: with lambda* = 0 every shift is
    // exactly zero; with lambda* != 0 some nu is nonzero (guaranteed by
    // non-degeneracy), so some threshold strictly moves.
    if (solved.lambda_star == 0.0 && max_shift > kSignTol) ok = false;
    if (solved.lambda_star != 0.0 && max_shift == 0.0) ok = false;
    detail << "lambda*=" << solved.lambda_star << " max|shift|=" << max_shift;
    return make_entry("aware-threshold-shift", Regime::aware, notion, delta,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

AuditEntry audit_ntr_redistribution(const PopulationSpec& pop, double c, Notion notion, double delta,
                      const SolveOptions& opt) {
    const PatternVerdict v = classify_pattern(pop, c, notion, Regime::aware, delta, opt);
    std::ostringstream detail;
    detail << "pattern=" << to_string(v.pattern) << " dNTR=(" << v.ntr_delta[0] << ","
           << v.ntr_delta[1] << ")";
    const bool ok = v.assertion_failures.empty();
    return make_entry("aware-ntr-redistribution", Regime::aware, notion, delta,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

AuditEntry audit_precision_directions(const PopulationSpec& pop, double c, Notion notion, double delta,
                      const SolveOptions& opt) {
    const FairSolveResult solved = solve(pop, c, notion, Regime::aware, delta, opt);
    const RandomizedClassifier fstar = bayes_unconstrained(pop, c, Regime::aware,
                                                           opt.tol_boundary);
    const GroupReport rep_star = rates(fstar, pop, c);
    const GroupReport rep_fair = rates(solved.classifier, pop, c);
    const GroupRoles roles = rep_star.roles_for(notion);

    bool applicable = false;
    bool ok = true;
    std::ostringstream detail;
    for (int s = 0; s < 2; ++s) {
        const auto& before = rep_star.group[s].precision;
        const auto& after = rep_fair.group[s].precision;
        if (!before || !after) continue;
        applicable = true;
        if (s == roles.advantaged && *after < *before - kSlack) ok = false;
        if (s == roles.disadvantaged && *after > *before + kSlack) ok = false;
        detail << "pi_" << s << ": " << *before << "->" << *after << " ";
    }
    if (!applicable)
        return make_entry("aware-precision", Regime::aware, notion, delta, AuditStatus::not_applicable,
                          "precision undefined under one of the classifiers", pop);
    return make_entry("aware-precision", Regime::aware, notion, delta,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

AuditEntry audit_threshold_regions(const PopulationSpec& pop, double c, Notion notion, double delta,
                       const SolveOptions& opt) {
    const FairSolveResult solved = solve(pop, c, notion, Regime::blind, delta, opt);
    const RegionPartition part = partition(pop, c, notion, solved);
    const FairnessCorrection corr = correction(pop, notion, Regime::blind);

    bool ok = true;
    for (const auto& cell : pop.cells()) {
        const double shift = solved.lambda_star * corr.nu.at({cell, kBlindGroup});
        if (part.q_high.count(cell) && !(shift > kSignTol)) ok = false;
        if (part.q_low.count(cell) && !(shift < -kSignTol)) ok = false;
        if (part.q_neutral.count(cell) && std::fabs(shift) > kSignTol) ok = false;
    }
    std::ostringstream detail;
    detail << "|Qh|=" << part.q_high.size() << " |Ql|=" << part.q_low.size()
           << " |Qo|=" << part.q_neutral.size();
    return make_entry("blind-threshold-regions", Regime::blind, notion, delta,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

AuditEntry audit_ntr_direction(const PopulationSpec& pop, double c, Notion notion, double delta,
                      const SolveOptions& opt) {
    const PatternVerdict v = classify_pattern(pop, c, notion, Regime::blind, delta, opt);
    std::ostringstream detail;
    detail << "pattern=" << to_string(v.pattern) << " separation=" << to_string(v.separation)
           << " dNTR=(" << v.ntr_delta[0] << "," << v.ntr_delta[1] << ")";
    if (v.separation == SeparationCase::neither)
        return make_entry("blind-ntr-direction", Regime::blind, notion, delta, AuditStatus::not_applicable,
                          detail.str(), pop);
    const bool ok = v.assertion_failures.empty();
    return make_entry("blind-ntr-direction", Regime::blind, notion, delta,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

AuditEntry audit_precision_case_claims(const PopulationSpec& pop, double c, Notion notion, double delta,
                      const SolveOptions& opt) {
    bool applicable = false;
    bool ok = true;
    std::ostringstream detail;
    for (int s = 0; s < 2; ++s) {
        const PrecisionCaseVerdict v = precision_cases(pop, c, notion, delta, s, opt);
        if (!v.precision_defined || !v.any_case()) continue;
        applicable = true;
        if (!v.directions_hold) ok = false;
        detail << "group" << s << (v.directions_hold ? " ok" : " FAILED") << " ";
    }
    if (!applicable)
        return make_entry("blind-precision-cases", Regime::blind, notion, delta, AuditStatus::not_applicable,
                          "no alignment case applies", pop);
    return make_entry("blind-precision-cases", Regime::blind, notion, delta,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

AuditEntry audit_sweep(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                       const std::vector<double>& deltas, const SolveOptions& opt) {
    const std::string claim = regime == Regime::aware ? "aware-sweep-monotone" : "blind-sweep-monotone";
    if (deltas.size() < 2)
        return make_entry(claim, regime, notion, std::nullopt, AuditStatus::not_applicable,
                          "needs at least two delta grid points", pop);
    if (regime == Regime::blind) {
        const FairSolveResult solved = solve(pop, c, notion, Regime::blind, deltas.front(), opt);
        const RegionPartition part = partition(pop, c, notion, solved);
        if (separation_case(part) == SeparationCase::neither)
            return make_entry(claim, regime, notion, std::nullopt, AuditStatus::not_applicable,
                              "neither zeta separation holds", pop);
    }
    const DeltaSweepResult sweep = delta_sweep(pop, c, notion, regime, deltas, opt);
    std::ostringstream detail;
    detail << deltas.size() << " grid points";
    if (!sweep.monotonicity_violations.empty())
        detail << "; " << sweep.monotonicity_violations.front();
    const bool ok = sweep.monotonicity_violations.empty();
    return make_entry(claim, regime, notion, std::nullopt,
                      ok ? AuditStatus::verified : AuditStatus::violated, detail.str(), pop);
}

} // namespace

bool AuditReport::any_aware_violation() const {
    return std::any_of(entries.begin(), entries.end(), [](const AuditEntry& e) {
        return e.regime == Regime::aware && e.status == AuditStatus::violated;
    });
}

bool AuditReport::any_violation() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const AuditEntry& e) { return e.status == AuditStatus::violated; });
}

std::vector<AuditGridPoint> full_grid(const std::vector<double>& deltas) {
    std::vector<AuditGridPoint> grid;
    for (Notion n : kAllNotions)
        for (Regime r : kAllRegimes)
            for (double d : deltas) grid.push_back({n, r, d});
    return grid;
}

AuditReport audit(const PopulationSpec& pop, double c, const std::vector<AuditGridPoint>& grid,
                  const SolveOptions& opt) {
    AuditReport report;
    report.population = pop.name();
    report.cost = c;

    // Deterministic order: notion, then regime, then ascending delta.
    for (Notion notion : kAllNotions) {
        for (Regime regime : kAllRegimes) {
            std::vector<double> deltas;
            for (const auto& p : grid)
                if (p.notion == notion && p.regime == regime) deltas.push_back(p.delta);
            std::sort(deltas.begin(), deltas.end());
            deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
            if (deltas.empty()) continue;

            for (double d : deltas) {
                if (regime == Regime::aware) {
                    report.entries.push_back(audit_threshold_shift(pop, c, notion, d, opt));
                    report.entries.push_back(audit_ntr_redistribution(pop, c, notion, d, opt));
                    report.entries.push_back(audit_precision_directions(pop, c, notion, d, opt));
                } else {
                    report.entries.push_back(audit_threshold_regions(pop, c, notion, d, opt));
                    report.entries.push_back(audit_ntr_direction(pop, c, notion, d, opt));
                    report.entries.push_back(audit_precision_case_claims(pop, c, notion, d, opt));
                }
            }
            report.entries.push_back(audit_sweep(pop, c, notion, regime, deltas, opt));
        }
    }
    return report;
}

} // namespace fairlevel
