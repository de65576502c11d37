#pragma once

#include <cstdint>

#include "mm/market.hpp"
#include "mm/strategy.hpp"

namespace mm {
namespace instances {

// Embedded scenarios used by the repro targets, the CLI, and the test
// suites. Everything here is self-contained: no data files needed.

/// Complete bipartite market, nb bidders valuing every asker at 2, na askers
/// with cost 1 everywhere, quarter-rebate rule.
Scenario refusal_scenario(int nb = 2, int na = 2);

/// Two bidders A (value k+1) and B (value k) competing for one asker C with
/// zero costs, quarter-rebate rule.
Scenario fig1_scenario(double k = 10.0);

/// Single edge with an inspectable value: draw 0 or 10 with probability 1/2
/// each, inspection cost 1 (strike price 8).
Scenario pandora_binary_scenario();

/// Three overlapping triples on six agents, value-per-member fixed, used for
/// the hypergraph welfare demo.
Scenario group_demo_scenario();

/// n x n bipartite market whose prior is a uniformly random perfect
/// matching (cyclic shifts): fated edges have value 10 / cost 0, all other
/// edges value 1 / cost 1. Used with lovers_profile.
Scenario lovers_scenario(int n = 12);
/// Truthful on the identity matching, refuse everywhere else.
StrategyProfile lovers_profile(const MarketGraph& graph);

// Randomized desk-scale instance generators (deterministic in the seed).

/// General (possibly non-bipartite) graph, n in [3, max_agents], values
/// U[0, 10], pay-your-bid, Degenerate prior. Edge count kept within the
/// exact-matching budget.
Scenario random_nonneg_graph(std::uint64_t seed, int max_agents = 8);

/// Complete-ish bipartite market with values U[0, 10] and costs U[0, 8],
/// quarter-rebate rule, Degenerate prior.
Scenario random_bipartite_rebate(std::uint64_t seed, int max_side = 4);

/// Complete bipartite nonnegative-values game (values U[0, 10] on both
/// directions of every edge), pay-your-bid, Degenerate prior.
Scenario bipartite_game(int nb, int na, std::uint64_t seed);

/// 3-uniform hypergraph with nonnegative values, pay-your-bid.
Scenario random_hypergraph3(std::uint64_t seed, int max_agents = 7);

/// Every incidence Inspectable: finite supports on [0, 10], inspection cost
/// below the mean. Prior draws the hidden values.
Scenario random_inspection_scenario(std::uint64_t seed, int max_agents = 6);

/// Random constant engine-space bids: each incidence bids scale * value with
/// scale drawn from {0, 0.25, 0.5, 0.75, 1}. For inspection scenarios the
/// scale applies to the distribution mean.
StrategyProfile random_constant_profile(const Scenario& scenario, std::uint64_t seed);

}  // namespace instances
}  // namespace mm
