#include <doctest.h>

#include <random>

#include "fairlevel/classifier.hpp"
#include "test_support.hpp"

using namespace fairlevel;
using namespace fltest;

namespace {

// Accept group 1 only, in the aware regime, on the two-point scenario.
RandomizedClassifier accept_group1(const PopulationSpec& pop) {
    std::map<DecisionUnit, double> accept;
    for (const auto& u : decision_units(pop, Regime::aware)) accept[u] = u.group == 1 ? 1.0 : 0.0;
    return {Regime::aware, std::move(accept)};
}

} // namespace

TEST_CASE("risk of a label-perfect classifier is zero") {
    // Labels are deterministic per unit: cell p carries only y=1, cell n only y=0.
    const PopulationSpec pop = PopulationSpec::from_entries(
        "det", "",
        {{"p", 1, 1, 0.3}, {"p", 0, 1, 0.3}, {"n", 1, 0, 0.2}, {"n", 0, 0, 0.2}});
    std::map<DecisionUnit, double> accept{{{"p", kBlindGroup}, 1.0}, {{"n", kBlindGroup}, 0.0}};
    const RandomizedClassifier f(Regime::blind, std::move(accept));
    CHECK(risk_cs(f, pop, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("risk of accept-all at c = 0.5 is half the negative mass") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    const RandomizedClassifier f = accept_all(pop, Regime::aware);
    CHECK(risk_cs(f, pop, 0.5) == doctest::Approx(0.5 * pop.prior_label(0)));
}

TEST_CASE("risk of accept-group-1 on the two-point scenario") {
    // 0.5 * P(g0, y=1) + 0.5 * P(g1, y=0) = 0.5*0.15 + 0.5*0.05 = 0.1
    const PopulationSpec pop = scenario("two-point-aware", {});
    CHECK(risk_cs(accept_group1(pop), pop, 0.5) == doctest::Approx(0.1));
}

TEST_CASE("rates of constant classifiers") {
    const PopulationSpec pop = scenario("two-point-aware", {});

    const GroupReport all = rates(accept_all(pop, Regime::aware), pop, 0.5);
    for (int s = 0; s < 2; ++s) {
        CHECK(all.group[s].gsr == doctest::Approx(1.0));
        CHECK(all.group[s].tpr == doctest::Approx(1.0));
        CHECK(all.group[s].fpr == doctest::Approx(1.0));
    }
    for (Notion n : kAllNotions) CHECK(all.dm_for(n) == doctest::Approx(0.0));

    const GroupReport none = rates(reject_all(pop, Regime::aware), pop, 0.5);
    for (int s = 0; s < 2; ++s) {
        CHECK(none.group[s].gsr == doctest::Approx(0.0));
        CHECK(!none.group[s].precision.has_value());
    }
    for (Notion n : kAllNotions) CHECK(none.dm_for(n) == doctest::Approx(0.0));
}

TEST_CASE("rates of accept-group-1 on the two-point scenario") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    const GroupReport rep = rates(accept_group1(pop), pop, 0.5);
    CHECK(rep.group[1].gsr == doctest::Approx(1.0));
    CHECK(rep.group[0].gsr == doctest::Approx(0.0));
    CHECK(rep.dm_for(Notion::dp) == doctest::Approx(1.0));
    CHECK(rep.group[1].tpr == doctest::Approx(1.0));
    CHECK(rep.group[0].tpr == doctest::Approx(0.0));
    CHECK(rep.dm_for(Notion::eo) == doctest::Approx(1.0));
    CHECK(*rep.group[1].precision == doctest::Approx(0.9));
    CHECK(!rep.group[0].precision.has_value());
}

TEST_CASE("group roles follow the sign of the disparity") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    const GroupReport rep = rates(accept_group1(pop), pop, 0.5);
    CHECK(rep.roles_for(Notion::dp).advantaged == 1);
    CHECK(rep.roles_for(Notion::dp).disadvantaged == 0);
    CHECK(!rep.roles_for(Notion::dp).tie);

    // Swapping the group labels flips the sign and the roles.
    const PopulationSpec swapped = swap_groups(pop);
    const GroupReport srep = rates(swap_classifier(accept_group1(pop)), swapped, 0.5);
    CHECK(srep.dm_for(Notion::dp) == doctest::Approx(-1.0));
    CHECK(srep.roles_for(Notion::dp).advantaged == 0);

    // Exact tie: accept-all.
    const GroupReport tie = rates(accept_all(pop, Regime::aware), pop, 0.5);
    CHECK(tie.roles_for(Notion::eo).tie);
    CHECK(tie.roles_for(Notion::eo).advantaged == 1);
    CHECK(tie.roles_for(Notion::eo).disadvantaged == 0);
}

TEST_CASE("NTR aliasing: dp=gsr, eo=tpr, pe=fpr") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const PopulationSpec pop = random_population(rng);
        for (Regime regime : kAllRegimes) {
            const GroupReport rep = rates(random_classifier(pop, regime, rng), pop, 0.4);
            for (int s = 0; s < 2; ++s) {
                CHECK(rep.group[s].ntr(Notion::dp) == rep.group[s].gsr);
                CHECK(rep.group[s].ntr(Notion::eo) == rep.group[s].tpr);
                CHECK(rep.group[s].ntr(Notion::pe) == rep.group[s].fpr);
            }
        }
    }
}

TEST_CASE("risk stays within [0, max(c, 1-c)]") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> cost(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const PopulationSpec pop = random_population(rng);
        const double c = cost(rng);
        for (Regime regime : kAllRegimes) {
            const double r = risk_cs(random_classifier(pop, regime, rng), pop, c);
            CHECK(r >= 0.0);
            CHECK(r <= std::max(c, 1.0 - c) + 1e-12);
        }
    }
}

TEST_CASE("DM is antisymmetric under group swap") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const PopulationSpec pop = random_population(rng);
        const PopulationSpec swapped = swap_groups(pop);
        for (Regime regime : kAllRegimes) {
            const RandomizedClassifier f = random_classifier(pop, regime, rng);
            const GroupReport a = rates(f, pop, 0.5);
            const GroupReport b = rates(swap_classifier(f), swapped, 0.5);
            for (Notion n : kAllNotions)
                CHECK(a.dm_for(n) == doctest::Approx(-b.dm_for(n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("raising acceptance probabilities weakly raises every rate") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const PopulationSpec pop = random_population(rng);
        for (Regime regime : kAllRegimes) {
            const RandomizedClassifier f = random_classifier(pop, regime, rng);
            std::map<DecisionUnit, double> higher = f.accept();
            for (auto& [u, p] : higher) p += (1.0 - p) * unit(rng);
            const RandomizedClassifier g(regime, std::move(higher));
            const GroupReport rf = rates(f, pop, 0.5);
            const GroupReport rg = rates(g, pop, 0.5);
            for (int s = 0; s < 2; ++s) {
                CHECK(rg.group[s].gsr >= rf.group[s].gsr - 1e-12);
                CHECK(rg.group[s].tpr >= rf.group[s].tpr - 1e-12);
                CHECK(rg.group[s].fpr >= rf.group[s].fpr - 1e-12);
            }
        }
    }
}

TEST_CASE("precision of accept-all equals the group base rate") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const PopulationSpec pop = random_population(rng);
        const GroupReport rep = rates(accept_all(pop, Regime::blind), pop, 0.5);
        for (int s = 0; s < 2; ++s) {
            REQUIRE(rep.group[s].precision.has_value());
            const double base = pop.prior_group_label(s, 1) / pop.prior_group(s);
            CHECK(*rep.group[s].precision == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("statistics require full coverage") {
    const PopulationSpec pop = scenario("two-point-aware", {});
    std::map<DecisionUnit, double> partial{{{"g1", 1}, 1.0}}; // misses (g0, 0)
    const RandomizedClassifier f(Regime::aware, std::move(partial));
    CHECK_THROWS_AS(risk_cs(f, pop, 0.5), CoverageError);
    CHECK_THROWS_AS(rates(f, pop, 0.5), CoverageError);
}

TEST_CASE("classifier construction rejects bad probabilities and mismatched regimes") {
    CHECK_THROWS_AS(RandomizedClassifier(Regime::blind, {{{"a", kBlindGroup}, 1.5}}), UsageError);
    CHECK_THROWS_AS(RandomizedClassifier(Regime::blind, {{{"a", 1}, 0.5}}), UsageError);
    CHECK_THROWS_AS(RandomizedClassifier(Regime::aware, {{{"a", kBlindGroup}, 0.5}}), UsageError);
}
