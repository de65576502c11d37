#include <doctest.h>

#include "mm/engine.hpp"
#include "mm/instances.hpp"
#include "mm/pandora.hpp"
#include "mm/rng.hpp"
#include "mm/strategy.hpp"

using namespace mm;

namespace {

AgentView view_with_values(std::vector<double> values) {
    AgentView v;
    v.id = "i";
    for (std::size_t g = 0; g < values.size(); ++g)
        v.entries.emplace_back(static_cast<GroupRef>(g),
                               RealizedValuation{DirectedValuation{ValueKind{values[g]}}, 0.0});
    return v;
}

double bid_at_start(const BidSchedule& s, GroupRef g) { return s.per_group.at(g).front().bid; }

}  // namespace

TEST_CASE("truthful bids values and asks costs") {
    AgentView v = view_with_values({2.0, 5.0});
    BidSchedule s = truthful(v);
    CHECK(bid_at_start(s, 0) == 2.0);
    CHECK(bid_at_start(s, 1) == 5.0);
    CHECK(s.reactive.empty());

    AgentView asker;
    asker.id = "j";
    asker.side = Side::Asker;
    asker.entries.emplace_back(0, RealizedValuation{DirectedValuation{CostKind{1.0}}, 0.0});
    asker.entries.emplace_back(1, RealizedValuation{DirectedValuation{CostKind{3.0}}, 0.0});
    BidSchedule a = truthful(asker);
    CHECK(bid_at_start(a, 0) == -1.0);  // ask 1
    CHECK(bid_at_start(a, 1) == -3.0);  // ask 3

    AgentView fig1_a = view_with_values({11.0});
    CHECK(bid_at_start(truthful(fig1_a), 0) == 11.0);

    AgentView hidden;
    hidden.id = "h";
    hidden.entries.emplace_back(
        0, RealizedValuation{DirectedValuation{InspectableKind{1.0, Distribution::point(5.0)}},
                             5.0});
    CHECK_THROWS_AS(truthful(hidden), Fault);
}

TEST_CASE("half_value halves and rejects what it cannot halve") {
    CHECK(bid_at_start(half_value(view_with_values({6.0})), 0) == 3.0);
    CHECK(bid_at_start(half_value(view_with_values({9.0})), 0) == 4.5);
    CHECK(bid_at_start(half_value(view_with_values({0.0})), 0) == 0.0);
    CHECK_THROWS_AS(half_value(view_with_values({-1.0})), Fault);

    AgentView asker;
    asker.id = "j";
    asker.entries.emplace_back(0, RealizedValuation{DirectedValuation{CostKind{1.0}}, 0.0});
    CHECK_THROWS_AS(half_value(asker), Fault);
}

TEST_CASE("zero_then_inspect bids zero and schedules the strike trigger") {
    AgentView v;
    v.id = "i";
    v.entries.emplace_back(
        0, RealizedValuation{
               DirectedValuation{InspectableKind{1.0, Distribution::finite({{0.0, 0.5}, {10.0, 0.5}})}},
               10.0});
    BidSchedule s = zero_then_inspect(v);
    CHECK(bid_at_start(s, 0) == 0.0);
    REQUIRE(s.reactive.size() == 1);
    CHECK(s.reactive[0].trigger_price == doctest::Approx(4.0));
    CHECK(s.reactive[0].strike == doctest::Approx(8.0));
    // Post-inspection bid is half the covered-call value.
    CHECK(s.reactive[0].bid_after(10.0) == doctest::Approx(4.0));
    CHECK(s.reactive[0].bid_after(0.0) == doctest::Approx(0.0));

    AgentView plain = view_with_values({3.0});
    CHECK_THROWS_AS(zero_then_inspect(plain), Fault);
}

TEST_CASE("high draws fire the match at the trigger price") {
    Scenario sc = instances::pandora_binary_scenario();
    // Find a seed whose hidden draw is 10.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        TypeProfile types = realize_types(sc.prior, seed);
        if (types.at("I", 0).drawn != 10.0) continue;
        Transcript t = run_match(sc.graph, types, uniform_profile(sc.graph, zero_then_inspect_ctor()),
                                 sc.payment_rule, seed);
        REQUIRE(t.matches.size() == 1);
        CHECK(t.matches[0].clearing_price == doctest::Approx(4.0));
        CHECK(t.inspected.count({"I", 0}) == 1);
        return;
    }
    FAIL("no high draw found in 50 seeds");
}

TEST_CASE("refusal profile bids zero and asks four") {
    Scenario sc = instances::refusal_scenario();
    StrategyProfile p = refusal_profile(sc.graph);
    TypeProfile types = realize_types(sc.prior, 0);
    BidSchedule b = p.ctors.at("B1")(make_agent_view(sc.graph, types, "B1"));
    BidSchedule a = p.ctors.at("A1")(make_agent_view(sc.graph, types, "A1"));
    for (const auto& [g, bps] : b.per_group) CHECK(bps.front().bid == 0.0);
    for (const auto& [g, bps] : a.per_group) CHECK(bps.front().bid == -4.0);

    MarketGraph unlabeled;
    unlabeled.agents = {"x"};
    CHECK_THROWS_AS(refusal_profile(unlabeled), Fault);
}

TEST_CASE("pairwise_truthful swaps exactly the pair") {
    Scenario sc = instances::refusal_scenario();
    StrategyProfile base = refusal_profile(sc.graph);
    StrategyProfile dev = pairwise_truthful(base, sc.graph, "B1", "A1");
    TypeProfile types = realize_types(sc.prior, 0);
    CHECK(dev.ctors.at("B1")(make_agent_view(sc.graph, types, "B1")).per_group.at(0).front().bid ==
          2.0);
    CHECK(dev.ctors.at("B2")(make_agent_view(sc.graph, types, "B2")).per_group.at(2).front().bid ==
          0.0);
    // Idempotent on an already-truthful base.
    StrategyProfile t = truthful_profile(sc.graph);
    StrategyProfile t2 = pairwise_truthful(t, sc.graph, "B1", "A1");
    Transcript r1 = run_scenario(sc, t, 5);
    Transcript r2 = run_scenario(sc, t2, 5);
    CHECK(r1.welfare == r2.welfare);
    CHECK(r1.payments == r2.payments);

    CHECK_THROWS_AS(pairwise_truthful(base, sc.graph, "B1", "B2"), Fault);
}

TEST_CASE("constant schedules cover requested groups only") {
    BidSchedule s = constant_schedule("i", {{1, 3.0}});
    CHECK(bid_at_start(s, 1) == 3.0);
    CHECK(s.per_group.size() == 1);
    BidSchedule empty = constant_schedule("lonely", {});
    CHECK(empty.per_group.empty());
    BidSchedule neg = constant_schedule("i", {{0, -2.0}});
    CHECK(bid_at_start(neg, 0) == -2.0);
}

TEST_CASE("constructors read only the owner's own entries") {
    Scenario sc = instances::random_bipartite_rebate(3);
    TypeProfile types = realize_types(sc.prior, 0);
    AgentId agent = sc.graph.agents.front();
    BidSchedule before = truthful(make_agent_view(sc.graph, types, agent));

    // Corrupt every other agent's entries; the view and schedule must not move.
    TypeProfile mutated = types;
    for (auto& [inc, val] : mutated.entries)
        if (inc.agent != agent) val = RealizedValuation{DirectedValuation{ValueKind{999.0}}, 0.0};
    BidSchedule after = truthful(make_agent_view(sc.graph, mutated, agent));
    REQUIRE(before.per_group.size() == after.per_group.size());
    for (const auto& [g, bps] : before.per_group)
        CHECK(bps.front().bid == after.per_group.at(g).front().bid);
}

TEST_CASE("half_value never loses money and splits the crossing with a like partner") {
    Rng rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        Scenario sc = instances::random_nonneg_graph(900 + trial);
        TypeProfile types = realize_types(sc.prior, 0);
        StrategyProfile halves = uniform_profile(sc.graph, half_value_ctor());
        Transcript t = run_match(sc.graph, types, halves, sc.payment_rule, rng.next_u64());
        for (const auto& a : sc.graph.agents) {
            CHECK(t.utilities.at(a) >= -1e-9);
            GroupRef g = t.matched_group(a);
            if (g >= 0) CHECK(t.utilities.at(a) == doctest::Approx(types.at(a, g).signed_value() / 2.0));
        }
        // A matched pair of half-bidders jointly earns the clearing price.
        for (const auto& m : t.matches) {
            double joint = 0.0;
            for (const auto& a : sc.graph.groups[m.group]) joint += t.utilities.at(a);
            CHECK(joint == doctest::Approx(m.clearing_price));
        }
    }
}

TEST_CASE("registry ids resolve and unknown ids fault") {
    Scenario sc = instances::refusal_scenario();
    CHECK_NOTHROW(resolve_profile("truthful", sc.graph));
    CHECK_NOTHROW(resolve_profile("refusal", sc.graph));
    CHECK_NOTHROW(resolve_ctor("constant:1.5"));
    CHECK_NOTHROW(resolve_ctor("constant:{\"0\": 2.0}"));
    CHECK_NOTHROW(resolve_ctor("linear:{\"0\": [0.5, 0.0]}"));
    CHECK_THROWS_AS(resolve_ctor("bogus"), Fault);
}

TEST_CASE("grid deviations honor the cap and stay deterministic") {
    AgentView v = view_with_values({4.0, 8.0, 2.0});
    auto grid = default_grid();  // 9 points, 3 groups -> 729 combos
    auto capped = grid_deviations(v, grid, 200, 13);
    CHECK(capped.size() == 200);
    auto again = grid_deviations(v, grid, 200, 13);
    for (std::size_t i = 0; i < capped.size(); ++i)
        for (const auto& [g, bps] : capped[i].per_group)
            CHECK(bps.front().bid == again[i].per_group.at(g).front().bid);

    AgentView small = view_with_values({4.0});
    CHECK(grid_deviations(small, grid, 200, 13).size() == 9);
}
