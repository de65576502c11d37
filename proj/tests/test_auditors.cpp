#include <doctest.h>

#include "mm/auditors.hpp"
#include "mm/instances.hpp"
#include "mm/pandora.hpp"
#include "mm/scenario_io.hpp"

using namespace mm;

TEST_CASE("expected welfare on the worked markets") {
    Scenario refusal = instances::refusal_scenario();
    CHECK(expected_welfare(refusal, refusal_profile(refusal.graph), 1, 1).mean == 0.0);

    Scenario fig1 = instances::fig1_scenario(10.0);
    auto w = expected_welfare(fig1, truthful_profile(fig1.graph), 1, 1);
    CHECK(w.mean == doctest::Approx(11.0));  // A--C matches, surplus k+1
    CHECK(w.stderr_mean == 0.0);
}

TEST_CASE("ex post stability of truthful play on the two-bidder market") {
    Scenario fig1 = instances::fig1_scenario(10.0);
    auto report = ex_post_audit(fig1, truthful_profile(fig1.graph), 4.0, 1, 1);
    CHECK(report.pass);
    REQUIRE(!report.statistics.empty());
    // Worst pair is (B, C): 0 + 2.75 against 10/4.
    CHECK(report.statistics.front().value == doctest::Approx(2.75 - 2.5));
}

TEST_CASE("refusal fails ex post stability with a replayable witness") {
    Scenario sc = instances::refusal_scenario();
    StrategyProfile profile = refusal_profile(sc.graph);
    auto report = ex_post_audit(sc, profile, 4.0, 1, 1);
    CHECK_FALSE(report.pass);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->violation == doctest::Approx(0.25));  // s/k = 1/4 vs 0
    auto replay = replay_witness(sc, profile, report);
    CHECK(replay.violation == report.witness->violation);
    auto replay2 = replay_witness(sc, profile, report);
    CHECK(transcript_to_json(replay.transcript, sc.graph).dump() ==
          transcript_to_json(replay2.transcript, sc.graph).dump());
}

TEST_CASE("ex post stability is vacuous without pairs") {
    Scenario sc;
    sc.graph.agents = {"solo"};
    sc.prior = DegeneratePrior{};
    StrategyProfile profile;
    profile.ctors["solo"] = constant_ctor(0.0);
    CHECK(ex_post_audit(sc, profile, 4.0, 1, 1).pass);
}

TEST_CASE("ex ante stability separates refusal from truthfulness") {
    Scenario sc = instances::refusal_scenario();
    auto family = DeviationFamily::pairwise_truthful();
    auto bad = ex_ante_audit(sc, refusal_profile(sc.graph), 4.0, family, 1, 1);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->lhs == doctest::Approx(0.0));
    CHECK(bad.witness->rhs == doctest::Approx(0.5 / 4.0));  // joint s/2 scaled by 1/k

    Scenario fig1 = instances::fig1_scenario(10.0);
    CHECK(ex_ante_audit(fig1, truthful_profile(fig1.graph), 4.0, family, 1, 1).pass);

    // A lone already-truthful edge is a fixed point even at k = 1.
    Scenario single = instances::fig1_scenario(10.0);
    single.graph.agents = {"A", "C"};
    single.graph.groups = {{"A", "C"}};
    single.graph.side_labels = {{"A", Side::Bidder}, {"C", Side::Asker}};
    TypeProfile tp;
    tp.entries[{"A", 0}] = RealizedValuation{DirectedValuation{ValueKind{11.0}}, 0.0};
    tp.entries[{"C", 0}] = RealizedValuation{DirectedValuation{CostKind{0.0}}, 0.0};
    single.prior = DegeneratePrior{tp};
    CHECK(ex_ante_audit(single, truthful_profile(single.graph), 1.0, family, 1, 1).pass);
}

TEST_CASE("nash audit certifies refusal and flags the overbid") {
    Scenario refusal = instances::refusal_scenario();
    std::vector<double> bids, asks;
    for (double b = 0.0; b <= 5.0; b += 0.5) bids.push_back(b);
    for (double a = -1.0; a <= 5.0; a += 0.5) asks.push_back(a);
    auto grid = DeviationFamily::absolute_levels(bids, asks);
    CHECK(nash_audit(refusal, refusal_profile(refusal.graph), grid, 1, 1).pass);

    Scenario fig1 = instances::fig1_scenario(10.0);
    auto family = DeviationFamily::absolute_levels({12.0}, {0.0});
    auto report = nash_audit(fig1, truthful_profile(fig1.graph), family, 1, 1);
    CHECK_FALSE(report.pass);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->agent == "B");
    CHECK(report.witness->rhs == doctest::Approx(1.0));  // k/4 - 3/2 at k = 10
    auto replay = replay_witness(fig1, truthful_profile(fig1.graph), report);
    CHECK(replay.violation == doctest::Approx(report.witness->violation));
}

TEST_CASE("nash verdicts survive agent relabeling") {
    auto relabel = [](Scenario sc) {
        std::map<AgentId, AgentId> ren;
        for (const auto& a : sc.graph.agents) ren[a] = "z_" + a;
        Scenario out = sc;
        out.graph.agents.clear();
        for (const auto& a : sc.graph.agents) out.graph.agents.push_back(ren[a]);
        out.graph.groups.clear();
        for (const auto& g : sc.graph.groups) {
            Group ng;
            for (const auto& a : g) ng.push_back(ren[a]);
            out.graph.groups.push_back(ng);
        }
        out.graph.side_labels.clear();
        for (const auto& [a, s] : sc.graph.side_labels) out.graph.side_labels[ren[a]] = s;
        TypeProfile np;
        for (const auto& [inc, v] : std::get<DegeneratePrior>(sc.prior).profile.entries)
            np.entries[{ren[inc.agent], inc.group}] = v;
        out.prior = DegeneratePrior{np};
        return out;
    };
    Scenario sc = instances::fig1_scenario(10.0);
    Scenario renamed = relabel(sc);
    auto family = DeviationFamily::absolute_levels({12.0}, {0.0});
    auto a = nash_audit(sc, truthful_profile(sc.graph), family, 1, 9);
    auto b = nash_audit(renamed, truthful_profile(renamed.graph), family, 1, 9);
    CHECK(a.pass == b.pass);
    REQUIRE((a.witness.has_value() && b.witness.has_value()));
    CHECK(a.witness->violation == doctest::Approx(b.witness->violation));
}

TEST_CASE("smoothness lemmas hold on sampled instances") {
    // Small mixed batch here; the acceptance suite runs the full volume.
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Scenario nonneg = instances::random_nonneg_graph(seed * 3);
        auto profile = instances::random_constant_profile(nonneg, seed);
        CHECK(smoothness_check(SmoothnessLemma::NonNeg, nonneg, profile, 1, seed).pass);

        Scenario hyper = instances::random_hypergraph3(seed * 5);
        auto hp = instances::random_constant_profile(hyper, seed);
        CHECK(smoothness_check(SmoothnessLemma::Group, hyper, hp, 1, seed).pass);

        Scenario rebate = instances::random_bipartite_rebate(seed * 7);
        auto rp = instances::random_constant_profile(rebate, seed);
        CHECK(smoothness_check(SmoothnessLemma::RebatePair, rebate, rp, 1, seed).pass);
    }
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Scenario insp = instances::random_inspection_scenario(seed * 11);
        auto ip = instances::random_constant_profile(insp, seed);
        CHECK(smoothness_check(SmoothnessLemma::Inspect, insp, ip, 4, seed).pass);
    }
}

TEST_CASE("a synthetic smoothness violation replays exactly") {
    // The rebate lemma needs the rebate rule; running the same market as
    // pay-your-bid lets pair deviations come up short, exercising the fail
    // path and the witness machinery.
    Scenario sc = instances::refusal_scenario();
    sc.payment_rule = PaymentRule::PayYourBid;
    StrategyProfile profile = refusal_profile(sc.graph);
    auto report = smoothness_check(SmoothnessLemma::RebatePair, sc, profile, 1, 1);
    CHECK_FALSE(report.pass);
    REQUIRE(report.witness.has_value());
    auto replay = replay_witness(sc, profile, report);
    CHECK(replay.violation == doctest::Approx(report.witness->violation));
}

TEST_CASE("welfare ratio report picks the right reference bound") {
    Scenario tri;
    tri.graph.agents = {"A", "B", "C"};
    tri.graph.groups = {{"A", "B"}, {"A", "C"}, {"B", "C"}};
    TypeProfile types;
    auto val = [](double v) { return RealizedValuation{DirectedValuation{ValueKind{v}}, 0.0}; };
    types.entries[{"A", 0}] = val(5.0);
    types.entries[{"B", 0}] = val(5.0);
    types.entries[{"A", 1}] = val(4.0);
    types.entries[{"C", 1}] = val(4.0);
    types.entries[{"B", 2}] = val(3.0);
    types.entries[{"C", 2}] = val(3.0);
    tri.prior = DegeneratePrior{types};
    auto r = poa_report(tri, truthful_profile(tri.graph), 1, 1);
    CHECK(r.ratio == doctest::Approx(1.0));
    CHECK(r.reference_bound == doctest::Approx(0.125));

    Scenario refusal = instances::refusal_scenario();
    auto rr = poa_report(refusal, refusal_profile(refusal.graph), 1, 1, 4.0);
    CHECK(rr.ratio == 0.0);
    CHECK(rr.reference_bound == doctest::Approx(1.0 / 16.0));

    Scenario hyper = instances::group_demo_scenario();
    auto hr = poa_report(hyper, truthful_profile(hyper.graph), 1, 1);
    CHECK(hr.ratio == doctest::Approx(1.0));
    CHECK(hr.reference_bound == doctest::Approx(1.0 / 18.0));

    Scenario zero = instances::refusal_scenario();
    for (auto& [inc, v] : std::get<DegeneratePrior>(zero.prior).profile.entries)
        v = val(0.0);
    CHECK_THROWS_AS(poa_report(zero, refusal_profile(zero.graph), 1, 1), Fault);
}

TEST_CASE("stability at level k carries the welfare guarantee") {
    // Truthful rebate profiles pass at k = 4, and their welfare clears a
    // quarter of the optimum.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Scenario sc = instances::random_bipartite_rebate(seed * 17);
        StrategyProfile profile = truthful_profile(sc.graph);
        auto audit = ex_post_audit(sc, profile, 4.0, 1, seed);
        REQUIRE(audit.pass);
        double welfare = expected_welfare(sc, profile, 1, seed).mean;
        double opt = expected_opt(sc, 1, seed).mean;
        CHECK(welfare >= opt / 4.0 - 1e-9);
    }
}

TEST_CASE("grid equilibrium scan finds equilibria that respect the bound") {
    Scenario sc = instances::bipartite_game(2, 2, 101);
    auto scan = scan_grid_equilibria(sc, {0.0, 0.25, 0.5, 0.75, 1.0}, 7);
    CHECK(scan.profiles == 625);
    CHECK(scan.equilibria > 0);
    CHECK(scan.min_ratio >= 0.125 - 1e-9);
}

TEST_CASE("worker count never changes a Monte Carlo answer") {
    Scenario sc = instances::pandora_binary_scenario();
    StrategyProfile zi = uniform_profile(sc.graph, zero_then_inspect_ctor());
    auto g1 = covered_call_gap(sc, zi, 800, 2, 1);
    auto g4 = covered_call_gap(sc, zi, 800, 2, 4);
    CHECK(g1.lhs == g4.lhs);
    CHECK(g1.rhs == g4.rhs);
    CHECK(g1.stderr_diff == g4.stderr_diff);

    Scenario mixed;
    mixed.graph.agents = {"x", "y"};
    mixed.graph.groups = {{"x", "y"}};
    IndependentEntriesPrior prior;
    prior.entries[{"x", 0}] =
        EntrySpec{EntrySpec::Kind::Value, Distribution::uniform(0.0, 10.0), 0.0};
    prior.entries[{"y", 0}] = EntrySpec{EntrySpec::Kind::Value, Distribution::point(1.0), 0.0};
    mixed.prior = prior;
    StrategyProfile halves = uniform_profile(mixed.graph, half_value_ctor());
    auto w1 = expected_welfare(mixed, halves, 600, 9, 1);
    auto w4 = expected_welfare(mixed, halves, 600, 9, 4);
    CHECK(w1.mean == w4.mean);
    CHECK(w1.stderr_mean == w4.stderr_mean);
    auto o1 = expected_opt(mixed, 600, 9, 1);
    auto o4 = expected_opt(mixed, 600, 9, 4);
    CHECK(o1.mean == o4.mean);
}

TEST_CASE("sampled priors flow through the stability audits") {
    // Bayesian refusal market: values fixed at 2, costs drawn around 1.
    Scenario sc = instances::refusal_scenario();
    IndependentEntriesPrior prior;
    for (const auto& [inc, val] : std::get<DegeneratePrior>(sc.prior).profile.entries) {
        if (val.spec.is_cost())
            prior.entries[inc] =
                EntrySpec{EntrySpec::Kind::Cost, Distribution::uniform(0.5, 1.5), 0.0};
        else
            prior.entries[inc] = EntrySpec{EntrySpec::Kind::Value, Distribution::point(2.0), 0.0};
    }
    sc.prior = prior;
    REQUIRE_FALSE(finite_support_size(sc.prior, 10000).has_value());

    StrategyProfile refusal = refusal_profile(sc.graph);
    // Truthful play stays 4-ex-post stable realization by realization.
    CHECK(ex_post_audit(sc, truthful_profile(sc.graph), 4.0, 60, 3).pass);
    // Refusal still fails against sampled surpluses.
    auto expost = ex_post_audit(sc, refusal, 4.0, 60, 3);
    CHECK_FALSE(expost.pass);
    REQUIRE(expost.witness.has_value());
    auto replay = replay_witness(sc, refusal, expost);
    CHECK(replay.violation == doctest::Approx(expost.witness->violation));

    // No unilateral grid deviation helps a refuser even in expectation.
    auto grid = DeviationFamily::absolute_levels({0.0, 2.0, 4.0, 5.0}, {-1.0, 0.0, 4.0});
    CHECK(nash_audit(sc, refusal, grid, 40, 3).pass);

    // The pairwise deviation to truthfulness beats refusal in expectation.
    auto exante = ex_ante_audit(sc, refusal, 4.0, DeviationFamily::pairwise_truthful(), 40, 3);
    CHECK_FALSE(exante.pass);
    REQUIRE(exante.witness.has_value());
    CHECK(exante.statistics.front().value > 0.0);
}
