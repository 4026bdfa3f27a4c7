#include "fairlevel/classifier.hpp"

#include <cmath>

namespace fairlevel {

const char* to_string(Regime r) { return r == Regime::aware ? "aware" : "blind"; }

const char* to_string(Notion n) {
    switch (n) {
        case Notion::dp: return "dp";
        case Notion::eo: return "eo";
        case Notion::pe: return "pe";
    }
    return "?";
}

Regime regime_from_string(const std::string& s) {
    if (s == "aware") return Regime::aware;
    if (s == "blind") return Regime::blind;
    throw UsageError("unknown regime: " + s);
}

Notion notion_from_string(const std::string& s) {
    if (s == "dp") return Notion::dp;
    if (s == "eo") return Notion::eo;
    if (s == "pe") return Notion::pe;
    throw UsageError("unknown notion: " + s);
}

bool notion_uses_label(Notion n, int label) {
    switch (n) {
        case Notion::dp: return true;
        case Notion::eo: return label == 1;
        case Notion::pe: return label == 0;
    }
    return false;
}

std::string to_string(const DecisionUnit& u) {
    if (u.group == kBlindGroup) return "(" + u.cell + ")";
    return "(" + u.cell + ", s=" + std::to_string(u.group) + ")";
}

std::vector<DecisionUnit> decision_units(const PopulationSpec& pop, Regime regime) {
    std::vector<DecisionUnit> units;
    for (const auto& cell : pop.cells()) {
        if (regime == Regime::blind) {
            units.push_back({cell, kBlindGroup});
        } else {
            for (int s = 0; s < 2; ++s)
                if (pop.cell_group_mass(cell, s) > 0.0) units.push_back({cell, s});
        }
    }
    return units;
}

double unit_mass(const PopulationSpec& pop, const DecisionUnit& u) {
    if (u.group == kBlindGroup) return pop.cell_mass(u.cell);
    return pop.cell_group_mass(u.cell, u.group);
}

double unit_label_mass(const PopulationSpec& pop, const DecisionUnit& u, int label) {
    if (u.group == kBlindGroup) return pop.cell_label_mass(u.cell, label);
    return pop.mass(u.cell, u.group, label);
}

std::optional<double> unit_eta(const PosteriorTables& tables, const DecisionUnit& u) {
    if (u.group == kBlindGroup) {
        auto it = tables.eta_blind.find(u.cell);
        if (it == tables.eta_blind.end()) return std::nullopt;
        return it->second;
    }
    return tables.eta(u.cell, u.group);
}

RandomizedClassifier::RandomizedClassifier(Regime regime, std::map<DecisionUnit, double> accept)
    : regime_(regime), accept_(std::move(accept)) {
    for (const auto& [unit, p] : accept_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw UsageError("acceptance probability for unit " + to_string(unit) +
                             " is outside [0, 1]");
        if (regime_ == Regime::blind && unit.group != kBlindGroup)
            throw UsageError("blind classifier keyed by grouped unit " + to_string(unit));
        if (regime_ == Regime::aware && unit.group == kBlindGroup)
            throw UsageError("aware classifier keyed by blind unit " + to_string(unit));
    }
}

double RandomizedClassifier::accept_prob(const DecisionUnit& u) const {
    auto it = accept_.find(u);
    if (it == accept_.end())
        throw CoverageError("classifier does not cover unit " + to_string(u));
    return it->second;
}

double RandomizedClassifier::prob_for(const CellId& cell, int group) const {
    return accept_prob({cell, regime_ == Regime::blind ? kBlindGroup : group});
}

namespace {

RandomizedClassifier constant_classifier(const PopulationSpec& pop, Regime regime, double p) {
    std::map<DecisionUnit, double> accept;
    for (const auto& u : decision_units(pop, regime)) accept[u] = p;
    return {regime, std::move(accept)};
}

} // namespace

RandomizedClassifier accept_all(const PopulationSpec& pop, Regime regime) {
    return constant_classifier(pop, regime, 1.0);
}

RandomizedClassifier reject_all(const PopulationSpec& pop, Regime regime) {
    return constant_classifier(pop, regime, 0.0);
}

double GroupStats::ntr(Notion n) const {
    switch (n) {
        case Notion::dp: return gsr;
        case Notion::eo: return tpr;
        case Notion::pe: return fpr;
    }
    return gsr;
}

double risk_cs(const RandomizedClassifier& f, const PopulationSpec& pop, double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw UsageError("cost c must lie in [0, 1]");
    double risk = 0.0;
    for (const auto& e : pop.entries()) {
        const double a = f.prob_for(e.cell, e.group);
        if (e.label == 1)
            risk += (1.0 - c) * e.mass * (1.0 - a); // false negatives
        else
            risk += c * e.mass * a; // false positives
    }
    return risk;
}

GroupReport rates(const RandomizedClassifier& f, const PopulationSpec& pop, double c) {
    GroupReport rep;
    rep.c = c;
    rep.risk = risk_cs(f, pop, c);

    // Accepted mass per (s, y).
    std::array<std::array<double, 2>, 2> accepted{{{0.0, 0.0}, {0.0, 0.0}}};
    for (const auto& e : pop.entries())
        accepted[e.group][e.label] += e.mass * f.prob_for(e.cell, e.group);

    for (int s = 0; s < 2; ++s) {
        auto& g = rep.group[s];
        const double ps = pop.prior_group(s);
        const double accepted_s = accepted[s][0] + accepted[s][1];
        g.gsr = accepted_s / ps;
        g.tpr = accepted[s][1] / pop.prior_group_label(s, 1);
        g.fpr = accepted[s][0] / pop.prior_group_label(s, 0);
        if (accepted_s > 0.0) g.precision = accepted[s][1] / accepted_s;
    }

    for (Notion n : kAllNotions) {
        const int i = notion_index(n);
        rep.dm[i] = rep.group[1].ntr(n) - rep.group[0].ntr(n);
        GroupRoles roles;
        if (std::fabs(rep.dm[i]) < 1e-12) {
            roles.tie = true; // convention: advantaged = 1
        } else if (rep.dm[i] > 0.0) {
            roles.advantaged = 1;
            roles.disadvantaged = 0;
        } else {
            roles.advantaged = 0;
            roles.disadvantaged = 1;
        }
        rep.roles[i] = roles;
    }
    return rep;
}

GroupRoles group_roles(const RandomizedClassifier& f, const PopulationSpec& pop, Notion n) {
    return rates(f, pop, 0.5).roles_for(n);
}

} // namespace fairlevel
