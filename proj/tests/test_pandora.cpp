#include <doctest.h>

#include "mm/engine.hpp"
#include "mm/instances.hpp"
#include "mm/pandora.hpp"
#include "mm/rng.hpp"

using namespace mm;

TEST_CASE("strike prices in closed form and by bisection") {
    CHECK(strike_price(Distribution::point(5.0), 1.0) == doctest::Approx(4.0));
    CHECK(strike_price(Distribution::finite({{0.0, 0.5}, {10.0, 0.5}}), 1.0) ==
          doctest::Approx(8.0).epsilon(1e-9));
    CHECK(strike_price(Distribution::uniform(0.0, 1.0), 0.125) == doctest::Approx(0.5));
    // r = 0 pins the strike at the essential max, every kind.
    CHECK(strike_price(Distribution::point(7.0), 0.0) == 7.0);
    CHECK(strike_price(Distribution::uniform(2.0, 6.0), 0.0) == 6.0);
    CHECK(strike_price(Distribution::finite({{1.0, 0.25}, {4.0, 0.75}}), 0.0) == 4.0);
    CHECK_THROWS_AS(strike_price(Distribution::point(0.5), 1.0), Fault);
    CHECK_THROWS_AS(strike_price(Distribution::point(1.0), -0.1), Fault);
}

TEST_CASE("strike residuals meet the tolerance on every solver path") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        Distribution d;
        int kind = trial % 3;
        if (kind == 0) {
            d = Distribution::point(rng.uniform(0.0, 10.0));
        } else if (kind == 1) {
            double lo = rng.uniform(0.0, 4.0);
            d = Distribution::uniform(lo, lo + rng.uniform(0.1, 6.0));
        } else {
            double a = rng.uniform(0.0, 3.0), b = rng.uniform(3.0, 7.0), c = rng.uniform(7.0, 10.0);
            d = Distribution::finite({{a, 0.25}, {b, 0.5}, {c, 0.25}});
        }
        double r = rng.uniform(0.0, d.mean());
        double sigma = strike_price(d, r);
        CHECK(std::abs(d.expected_excess(sigma) - r) <= 1e-9);
        CHECK(sigma >= -1e-12);
    }
}

TEST_CASE("strike price is monotone in the inspection cost") {
    Distribution d = Distribution::finite({{0.0, 0.4}, {3.0, 0.3}, {9.0, 0.3}});
    double prev = strike_price(d, 0.0);
    for (double r = 0.3; r <= d.mean(); r += 0.3) {
        double cur = strike_price(d, r);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}

TEST_CASE("covered call clamps at the strike") {
    CHECK(covered_call(10.0, 8.0) == 8.0);
    CHECK(covered_call(0.0, 8.0) == 0.0);
    CHECK(covered_call(8.0, 8.0) == 8.0);
}

TEST_CASE("pandora indices cover exactly the inspectable incidences") {
    Scenario sc = instances::pandora_binary_scenario();
    TypeProfile types = realize_types(sc.prior, 4);
    auto indices = pandora_indices(sc.graph, types);
    REQUIRE(indices.size() == 2);
    for (const auto& idx : indices) {
        if (idx.agent == "I") CHECK(idx.strike == doctest::Approx(8.0));
        if (idx.agent == "J") CHECK(idx.strike == doctest::Approx(0.0));
    }
}

TEST_CASE("exercise audit passes the inspect-then-bid strategy and vacuous runs") {
    Scenario sc = instances::pandora_binary_scenario();
    StrategyProfile zi = uniform_profile(sc.graph, zero_then_inspect_ctor());
    std::vector<Transcript> runs;
    std::vector<TypeProfile> types;
    for (std::uint64_t s = 0; s < 60; ++s) {
        types.push_back(realize_types(sc.prior, s));
        runs.push_back(run_match(sc.graph, types.back(), zi, sc.payment_rule, s));
    }
    CHECK(exercise_audit(sc.graph, runs, types).pass);

    // Nobody inspecting passes vacuously.
    StrategyProfile silent = uniform_profile(sc.graph, constant_ctor(-1.0));
    std::vector<Transcript> quiet = {run_match(sc.graph, types[0], silent, sc.payment_rule, 0)};
    std::vector<TypeProfile> one = {types[0]};
    auto vac = exercise_audit(sc.graph, quiet, one);
    CHECK(vac.pass);
    CHECK(vac.audited == 0);
}

TEST_CASE("exercise audit catches a constructed breach") {
    Scenario sc = instances::pandora_binary_scenario();
    TypeProfile types;
    for (std::uint64_t s = 0; s < 40; ++s) {
        types = realize_types(sc.prior, s);
        if (types.at("I", 0).drawn == 10.0) break;
    }
    REQUIRE(types.at("I", 0).drawn == 10.0);
    // Inspect at the sweep start but never raise the bid.
    StrategyProfile sabotage;
    sabotage.ctors["J"] = constant_ctor(0.0);
    sabotage.ctors["I"] = [](const AgentView& v) {
        BidSchedule s;
        s.owner = v.id;
        s.per_group[0] = {Breakpoint{.bid = -5.0}};
        s.reactive.push_back(InspectTrigger{.group = 0,
                                            .trigger_price = 1e18,
                                            .mode = InspectTrigger::PostBid::Constant,
                                            .offset = -5.0});
        return s;
    };
    Transcript t = run_match(sc.graph, types, sabotage, sc.payment_rule, 1);
    CHECK(t.inspected.count({"I", 0}) == 1);
    CHECK(t.matches.empty());
    std::vector<Transcript> runs = {t};
    std::vector<TypeProfile> tp = {types};
    auto report = exercise_audit(sc.graph, runs, tp);
    CHECK_FALSE(report.pass);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->incidence.agent == "I");
    CHECK(report.witness->drawn == 10.0);
    CHECK(report.witness->strike == doctest::Approx(8.0));
}

TEST_CASE("covered-call gap: equality for exercising strategies") {
    Scenario sc = instances::pandora_binary_scenario();
    auto gap = covered_call_gap(sc, uniform_profile(sc.graph, zero_then_inspect_ctor()), 4000, 11);
    CHECK(std::abs(gap.lhs - gap.rhs) <= 3.0 * gap.stderr_diff + 1e-9);
    CHECK_FALSE(gap.violation);
}

TEST_CASE("covered-call gap: wasted inspections push the left side negative") {
    Scenario sc = instances::pandora_binary_scenario();
    StrategyProfile waste;
    waste.ctors["J"] = constant_ctor(-1.0);
    waste.ctors["I"] = [](const AgentView& v) {
        BidSchedule s;
        s.owner = v.id;
        s.per_group[0] = {Breakpoint{.bid = -1.0}};
        s.reactive.push_back(InspectTrigger{.group = 0,
                                            .trigger_price = 1e18,
                                            .mode = InspectTrigger::PostBid::Constant,
                                            .offset = -1.0}); 
        return s;
    };
    auto gap = covered_call_gap(sc, waste, 500, 3);
    CHECK(gap.lhs == doctest::Approx(-1.0));  // A == 0, I == 1, r == 1
    CHECK(gap.rhs == 0.0);
    CHECK_FALSE(gap.violation);  // inequality direction is fine

    StrategyProfile never;
    never.ctors["I"] = constant_ctor(-1.0);
    never.ctors["J"] = constant_ctor(-1.0);
    auto silent = covered_call_gap(sc, never, 500, 3);
    CHECK(silent.lhs == 0.0);
    CHECK(silent.rhs == 0.0);
}

TEST_CASE("dead-edge triggers never inspect") {
    // Two bidders chase one partner; the loser's trigger must not charge r
    // once the edge is gone.
    Scenario sc;
    sc.graph.agents = {"x", "y", "z"};
    sc.graph.groups = {{"x", "z"}, {"y", "z"}};
    IndependentEntriesPrior prior;
    prior.entries[{"x", 0}] =
        EntrySpec{EntrySpec::Kind::Inspectable, Distribution::point(8.0), 1.0};
    prior.entries[{"z", 0}] =
        EntrySpec{EntrySpec::Kind::Inspectable, Distribution::point(0.0), 0.0};
    prior.entries[{"y", 1}] =
        EntrySpec{EntrySpec::Kind::Inspectable, Distribution::point(2.0), 1.0};
    prior.entries[{"z", 1}] =
        EntrySpec{EntrySpec::Kind::Inspectable, Distribution::point(0.0), 0.0};
    sc.prior = prior;
    TypeProfile types = realize_types(sc.prior, 1);
    StrategyProfile zi = uniform_profile(sc.graph, zero_then_inspect_ctor());
    Transcript t = run_match(sc.graph, types, zi, sc.payment_rule, 1);
    // x (strike 7) inspects at 3.5 and locks z; y's trigger at 0.5 finds the
    // edge dead and must stay silent.
    REQUIRE(t.matches.size() == 1);
    CHECK(t.matches[0].group == 0);
    CHECK(t.inspected.count({"y", 1}) == 0);
    CHECK(t.inspection_costs.at("y") == 0.0);
}

TEST_CASE("covered-call gap reports per-incidence estimates") {
    Scenario sc = instances::pandora_binary_scenario();
    auto gap = covered_call_gap(sc, uniform_profile(sc.graph, zero_then_inspect_ctor()), 2000, 21);
    REQUIRE(gap.per_incidence.size() == 2);
    double lhs = 0.0, rhs = 0.0;
    for (const auto& ig : gap.per_incidence) {
        lhs += ig.lhs;
        rhs += ig.rhs;
        CHECK(ig.lhs <= ig.rhs + 3.0 * ig.stderr_diff + 1e-9);
    }
    CHECK(lhs == doctest::Approx(gap.lhs));
    CHECK(rhs == doctest::Approx(gap.rhs));
}
