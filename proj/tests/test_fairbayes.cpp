#include <doctest.h>

#include <cmath>

#include "fairlevel/corpus.hpp"
#include "fairlevel/fairbayes.hpp"
#include "fairlevel/oracle.hpp"
#include "test_support.hpp"

using namespace fairlevel;
using namespace fltest;

namespace {
const std::vector<double> kDeltas{0.0, 0.05, 0.2, 0.5};
}

TEST_CASE("aware DP correction with equal priors is +/-2") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    const FairnessCorrection corr = correction(pop, Notion::dp, Regime::aware);
    CHECK(corr.nu.at({"g1", 1}) == doctest::Approx(2.0));
    CHECK(corr.nu.at({"g0", 0}) == doctest::Approx(-2.0));
}

TEST_CASE("blind DP correction vanishes when composition matches the priors") {
    // Cell n has P(S=1|n) = 0.5 = P(S=1) with binary-exact masses.
    std::vector<MassEntry> entries;
    push_cell(entries, "n", 0.5, 0.5, 0.75, 0.25);
    push_cell(entries, "p", 0.25, 0.75, 0.875, 0.5);
    push_cell(entries, "q", 0.25, 0.25, 0.5, 0.125);
    const PopulationSpec pop = PopulationSpec::from_entries("t", "", entries);
    const FairnessCorrection corr = correction(pop, Notion::dp, Regime::blind);
    CHECK(corr.nu.at({"n", kBlindGroup}) == 0.0);
    CHECK(corr.nu.at({"p", kBlindGroup}) > 0.0);
    CHECK(corr.nu.at({"q", kBlindGroup}) < 0.0);
}

TEST_CASE("blind EO correction matches the plug-in ratios") {
    // Built so that, for cell u:
    //   P(S=1,Y=1|u) = 0.2, P(S=1,Y=1) = 0.4, P(S=0,Y=1|u) = 0.1, P(S=0,Y=1) = 0.1
    // giving nu_EO(u) = 0.2/0.4 - 0.1/0.1 = -0.5.
    const PopulationSpec pop = PopulationSpec::from_entries(
        "t", "",
        {{"u", 1, 1, 0.10}, {"u", 0, 1, 0.05}, {"u", 1, 0, 0.20}, {"u", 0, 0, 0.15},
         {"v", 1, 1, 0.30}, {"v", 0, 1, 0.05}, {"v", 1, 0, 0.10}, {"v", 0, 0, 0.05}});
    REQUIRE(pop.prior_group_label(1, 1) == doctest::Approx(0.4));
    REQUIRE(pop.prior_group_label(0, 1) == doctest::Approx(0.1));
    const FairnessCorrection corr = correction(pop, Notion::eo, Regime::blind);
    CHECK(corr.nu.at({"u", kBlindGroup}) == doctest::Approx(-0.5));

    // Independent recomputation from raw masses.
    const double expected = (pop.mass("u", 1, 1) / pop.cell_mass("u")) / pop.prior_group_label(1, 1) -
                            (pop.mass("u", 0, 1) / pop.cell_mass("u")) / pop.prior_group_label(0, 1);
    CHECK(corr.nu.at({"u", kBlindGroup}) == doctest::Approx(expected));
}

TEST_CASE("unconstrained Bayes classifier thresholds eta at c") {
    const PopulationSpec pop = scenario("two-point-aware", {});

    const RandomizedClassifier low = bayes_unconstrained(pop, 0.0, Regime::aware);
    for (const auto& [u, p] : low.accept()) CHECK(p == 1.0); // every eta > 0

    const RandomizedClassifier high = bayes_unconstrained(pop, 1.0, Regime::aware);
    for (const auto& [u, p] : high.accept()) CHECK(p == 0.0);

    const RandomizedClassifier mid = bayes_unconstrained(pop, 0.5, Regime::aware);
    CHECK(mid.accept_prob({"g1", 1}) == 1.0);
    CHECK(mid.accept_prob({"g0", 0}) == 0.0);

    // Exhaustive check: no deterministic classifier has lower risk at c = 0.5.
    const double bayes_risk = risk_cs(mid, pop, 0.5);
    for (int a1 = 0; a1 < 2; ++a1) {
        for (int a0 = 0; a0 < 2; ++a0) {
            const RandomizedClassifier f(
                Regime::aware, {{{"g1", 1}, double(a1)}, {{"g0", 0}, double(a0)}});
            CHECK(risk_cs(f, pop, 0.5) >= bayes_risk - 1e-15);
        }
    }
}

TEST_CASE("fair_threshold reduces to the unconstrained classifier at lambda 0") {
    for (const auto& pop : {scenario("two-point-aware", {}), scenario("blind-separated-high", {})}) {
        for (Regime regime : kAllRegimes) {
            for (Notion notion : kAllNotions) {
                CHECK(fair_threshold(pop, 0.35, notion, regime, 0.0, {}) ==
                      bayes_unconstrained(pop, 0.35, regime));
            }
        }
    }
}

TEST_CASE("fair_threshold shifts aware DP thresholds in opposite directions") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    // With equal priors nu = +/-2: group 1 threshold is c + 2 lambda, group 0 is c - 2 lambda.
    // lambda = 0.15 pushes the group-1 threshold to 0.8 < 0.9 (still accepted) and
    // the group-0 threshold to 0.2 < 0.3 (now accepted).
    const RandomizedClassifier f = fair_threshold(pop, 0.5, Notion::dp, Regime::aware, 0.15, {});
    CHECK(f.accept_prob({"g1", 1}) == 1.0);
    CHECK(f.accept_prob({"g0", 0}) == 1.0);
    // lambda = 0.25 pushes the group-1 threshold to 1.0 > 0.9.
    const RandomizedClassifier g = fair_threshold(pop, 0.5, Notion::dp, Regime::aware, 0.25, {});
    CHECK(g.accept_prob({"g1", 1}) == 0.0);
}

TEST_CASE("fair_threshold honors boundary randomization and rejects off-boundary alpha") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    // (g0, 0) sits exactly on the boundary at lambda = (0.3 - 0.5) / (-2) = 0.1.
    const std::map<DecisionUnit, double> alpha{{{"g0", 0}, 0.5}};
    const RandomizedClassifier f = fair_threshold(pop, 0.5, Notion::dp, Regime::aware, 0.1, alpha);
    CHECK(f.accept_prob({"g0", 0}) == doctest::Approx(0.5));

    CHECK_THROWS_AS(fair_threshold(pop, 0.5, Notion::dp, Regime::aware, 0.05, alpha), UsageError);
    const std::map<DecisionUnit, double> bad{{{"g0", 0}, 1.5}};
    CHECK_THROWS_AS(fair_threshold(pop, 0.5, Notion::dp, Regime::aware, 0.1, bad), UsageError);
}

TEST_CASE("symmetric-null populations are already fair for every notion") {
    const PopulationSpec pop = scenario("symmetric-null", {});
    for (Notion notion : kAllNotions) {
        for (Regime regime : kAllRegimes) {
            for (double delta : kDeltas) {
                const FairSolveResult r = solve(pop, 0.5, notion, regime, delta);
                CHECK(r.already_fair);
                CHECK(r.lambda_star == 0.0);
                CHECK(r.classifier == bayes_unconstrained(pop, 0.5, regime));
            }
        }
    }
}

TEST_CASE("two-point DP at delta 0 solves to accept-all with risk 0.2") {
    // Along DP-feasible classifiers with equal group acceptance p, the risk is
    // 0.3 - 0.1 p, minimized at p = 1 (verified by the oracle suite as well).
    const PopulationSpec pop = scenario("two-point-aware", {});
    const FairSolveResult r = solve(pop, 0.5, Notion::dp, Regime::aware, 0.0);
    CHECK(r.achieved_risk == doctest::Approx(0.2));
    CHECK(std::fabs(r.achieved_dm) <= 1e-9);
    const GroupReport rep = rates(r.classifier, pop, 0.5);
    CHECK(rep.group[0].gsr == doctest::Approx(1.0));
    CHECK(rep.group[1].gsr == doctest::Approx(1.0));
}

TEST_CASE("a slack tolerance returns the unconstrained classifier") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    const FairSolveResult r = solve(pop, 0.5, Notion::dp, Regime::aware, 1.0);
    CHECK(r.already_fair);
    CHECK(r.lambda_star == 0.0);
    CHECK(r.classifier == bayes_unconstrained(pop, 0.5, Regime::aware));
}

TEST_CASE("solve satisfies the constraint and its invariants across the corpus") {
    for (const auto& pop : corpus_populations()) {
        const PosteriorTables tables = derive_posteriors(pop);
        for (Notion notion : kAllNotions) {
            for (Regime regime : kAllRegimes) {
                const FairnessCorrection corr = correction(pop, notion, regime);
                for (double delta : kDeltas) {
                    const FairSolveResult r = solve(pop, 0.5, notion, regime, delta);
                    CHECK(std::fabs(r.achieved_dm) <= delta + 1e-9);
                    if (r.already_fair) {
                        CHECK(r.lambda_star == 0.0);
                        CHECK(r.classifier == bayes_unconstrained(pop, 0.5, regime));
                    }
                    for (const auto& [u, a] : r.boundary_alpha) {
                        if (a == 0.0) continue;
                        const double h =
                            *unit_eta(tables, u) - 0.5 - r.lambda_star * corr.nu.at(u);
                        CHECK(std::fabs(h) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("aware threshold shifts keep the advantaged side above c") {
    for (const auto& pop : corpus_populations()) {
        for (Notion notion : kAllNotions) {
            const GroupRoles roles =
                rates(bayes_unconstrained(pop, 0.5, Regime::aware), pop, 0.5).roles_for(notion);
            const FairnessCorrection corr = correction(pop, notion, Regime::aware);
            for (double delta : kDeltas) {
                const FairSolveResult r = solve(pop, 0.5, notion, Regime::aware, delta);
                double max_shift = 0.0;
                for (const auto& [u, nu] : corr.nu) {
                    const double shift = r.lambda_star * nu;
                    max_shift = std::max(max_shift, std::fabs(shift));
                    if (u.group == roles.advantaged) CHECK(shift >= -1e-12);
                    if (u.group == roles.disadvantaged) CHECK(shift <= 1e-12);
                }
                if (r.lambda_star == 0.0) CHECK(max_shift == 0.0);
            }
        }
    }
}

TEST_CASE("aware fairness moves rates and precisions in opposite directions") {
    for (const auto& pop : corpus_populations()) {
        const RandomizedClassifier fstar = bayes_unconstrained(pop, 0.5, Regime::aware);
        const GroupReport star = rates(fstar, pop, 0.5);
        for (Notion notion : kAllNotions) {
            const GroupRoles roles = star.roles_for(notion);
            for (double delta : kDeltas) {
                const FairSolveResult r = solve(pop, 0.5, notion, Regime::aware, delta);
                const GroupReport fair = rates(r.classifier, pop, 0.5);
                const int sh = roles.advantaged;
                const int sl = roles.disadvantaged;
                CHECK(fair.group[sh].ntr(notion) <= star.group[sh].ntr(notion) + 1e-9);
                CHECK(fair.group[sl].ntr(notion) >= star.group[sl].ntr(notion) - 1e-9);
                if (star.group[sh].precision && fair.group[sh].precision)
                    CHECK(*fair.group[sh].precision >= *star.group[sh].precision - 1e-9);
                if (star.group[sl].precision && fair.group[sl].precision)
                    CHECK(*fair.group[sl].precision <= *star.group[sl].precision + 1e-9);

                // Deletion-only on the advantaged group, addition-only on the other.
                for (const auto& [u, p] : fstar.accept()) {
                    if (u.group == sh) CHECK(r.classifier.accept_prob(u) <= p + 1e-12);
                    if (u.group == sl) CHECK(r.classifier.accept_prob(u) >= p - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("re-solving at the achieved disparity does not raise the risk") {
    for (const auto& pop : corpus_populations()) {
        for (Notion notion : kAllNotions) {
            for (Regime regime : kAllRegimes) {
                const FairSolveResult first = solve(pop, 0.5, notion, regime, 0.05);
                const FairSolveResult again =
                    solve(pop, 0.5, notion, regime, std::fabs(first.achieved_dm));
                CHECK(again.achieved_risk <= first.achieved_risk + 1e-9);
            }
        }
    }
}

TEST_CASE("aware delta sweeps are monotone in the documented directions") {
    const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    for (const auto& pop : corpus_populations()) {
        for (Notion notion : kAllNotions) {
            const DeltaSweepResult sweep = delta_sweep(pop, 0.5, notion, Regime::aware, grid);
            CHECK(sweep.monotonicity_violations.empty());
            // Past the unconstrained disparity every solve is trivially fair.
            const double dm0 = std::fabs(
                rates(bayes_unconstrained(pop, 0.5, Regime::aware), pop, 0.5).dm_for(notion));
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (grid[i] >= dm0) {
                    CHECK(sweep.results[i].lambda_star == 0.0);
                    CHECK(sweep.results[i].already_fair);
                }
            }
        }
    }
}

TEST_CASE("solver matches the oracle on randomized instances") {
    // Random populations, costs and tolerances, with the group labels flipped
    // on every other draw so negative disparities (lambda* < 0) are exercised.
    std::mt19937 rng(987654321);
    std::uniform_real_distribution<double> cost(0.0, 1.0);
    std::uniform_real_distribution<double> tol(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        PopulationSpec pop = random_population(rng);
        if (trial % 2 == 1) pop = swap_groups(pop);
        const double c = cost(rng);
        const double d = tol(rng) < 0.3 ? 0.0 : tol(rng) * 0.5;
        for (Notion n : kAllNotions) {
            for (Regime r : kAllRegimes) {
                if (decision_units(pop, r).size() > 6) continue;
                const CertifyResult res = certify(pop, c, n, r, d);
                INFO(to_string(n), "/", to_string(r), " c=", c, " delta=", d);
                CHECK(res.pass);
                CHECK(res.gap <= 1e-7 * std::max(1.0, res.oracle_risk));
            }
        }
    }
}

TEST_CASE("aware directional results hold at arbitrary costs") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> cost(0.05, 0.95);
    for (int trial = 0; trial < 40; ++trial) {
        const PopulationSpec pop = random_population(rng);
        const double c = cost(rng);
        const GroupReport star = rates(bayes_unconstrained(pop, c, Regime::aware), pop, c);
        for (Notion n : kAllNotions) {
            const GroupRoles roles = star.roles_for(n);
            for (double d : {0.0, 0.1}) {
                const FairSolveResult r = solve(pop, c, n, Regime::aware, d);
                const GroupReport fair = rates(r.classifier, pop, c);
                const int sh = roles.advantaged, sl = roles.disadvantaged;
                CHECK(fair.group[sh].ntr(n) <= star.group[sh].ntr(n) + 1e-9);
                CHECK(fair.group[sl].ntr(n) >= star.group[sl].ntr(n) - 1e-9);
                if (star.group[sh].precision && fair.group[sh].precision)
                    CHECK(*fair.group[sh].precision >= *star.group[sh].precision - 1e-9);
                if (star.group[sl].precision && fair.group[sl].precision)
                    CHECK(*fair.group[sl].precision <= *star.group[sl].precision + 1e-9);
            }
        }
    }
}

TEST_CASE("blind sweeps without separation surface direction crossings") {
    // Found by randomized search: under PE, group 1's FPR first overshoots and
    // then undershoots its unconstrained value as delta varies, so the sweep
    // must surface the crossing as an observation (and not as a violation).
    const PopulationSpec pop = PopulationSpec::from_entries(
        "crossing", "",
        {{"x0", 0, 0, 0.012517186526341848}, {"x0", 0, 1, 0.012293102439709167},
         {"x0", 1, 0, 0.024900108457163433}, {"x0", 1, 1, 0.151171094771809},
         {"x1", 0, 0, 0.034939470006355694}, {"x1", 0, 1, 0.057920160644999316},
         {"x1", 1, 0, 0.14157432645304543},  {"x1", 1, 1, 0.03632555422539858},
         {"x2", 0, 0, 0.02514170919290168},  {"x2", 0, 1, 0.04722331349953822},
         {"x2", 1, 0, 0.020007792743418282}, {"x2", 1, 1, 0.007711210569392581},
         {"x3", 0, 0, 0.027398068615767452}, {"x3", 0, 1, 0.2396691133244009},
         {"x3", 1, 0, 0.020938254812405466}, {"x3", 1, 1, 0.14026953371735298}});
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    const DeltaSweepResult sweep = delta_sweep(pop, 0.5, Notion::pe, Regime::blind, grid);
    CHECK(sweep.monotonicity_violations.empty());
    REQUIRE(!sweep.observations.empty());
    CHECK(sweep.observations.front().find("group 1") != std::string::npos);
    CHECK(sweep.observations.front().find("crosses") != std::string::npos);
}

TEST_CASE("delta_sweep validates its grid") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    CHECK_THROWS_AS(delta_sweep(pop, 0.5, Notion::dp, Regime::aware, {0.2, 0.1}), UsageError);
    CHECK_THROWS_AS(delta_sweep(pop, 0.5, Notion::dp, Regime::aware, {0.1, 0.1}), UsageError);
}

TEST_CASE("solve validates inputs") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    CHECK_THROWS_AS(solve(pop, 0.5, Notion::dp, Regime::aware, 1.5), UsageError);
    CHECK_THROWS_AS(solve(pop, -0.1, Notion::dp, Regime::aware, 0.5), UsageError);
}
