#pragma once

#include <vector>

#include "mm/market.hpp"

namespace mm {

/// Ground-truth combinatorial instance: groups with weights, mirroring a
/// MarketGraph. Weights are edge surpluses, group surpluses, or covered-call
/// sums depending on the audit.
struct WeightedInstance {
    std::vector<std::vector<int>> groups;  // member agent indices
    std::vector<double> weights;
    int num_agents = 0;
};

struct MatchingResult {
    std::vector<int> chosen;  // group indices, pairwise disjoint
    double total_weight = 0.0;
};

inline constexpr int kMaxOracleGroups = 24;
inline constexpr int kMaxOracleAgents = 64;

/// Exact maximum-weight matching by branch-and-bound over subsets of
/// disjoint groups. The empty matching is feasible, so the optimum is never
/// negative and nonpositive-weight groups are never chosen.
/// Faults past the search budget (kMaxOracleGroups groups).
MatchingResult max_weight_matching(const WeightedInstance& inst);

/// Greedy matching: groups in decreasing weight order (ties broken by the
/// seeded priority shared with the clock engine), accepted when disjoint
/// from everything accepted so far and strictly positive.
MatchingResult greedy_matching(const WeightedInstance& inst, std::uint64_t tie_seed);

/// Instance with realized group surpluses as weights.
WeightedInstance surplus_instance(const MarketGraph& graph, const TypeProfile& types);

/// Instance weighted by covered-call sums: each member contributes
/// min(sigma, drawn) (plain signed value for non-inspectable entries).
WeightedInstance covered_call_instance(const MarketGraph& graph, const TypeProfile& types);

struct ExpectedValue {
    double mean = 0.0;
    double stderr_mean = 0.0;
    long samples = 0;
};

/// Monte Carlo E[max-weight matching of realized surpluses]. Degenerate
/// priors are exact with stderr 0.
ExpectedValue expected_opt(const Scenario& scenario, long samples, std::uint64_t seed,
                           int jobs = 1);

/// Same but on covered-call weights.
ExpectedValue expected_covered_call_opt(const Scenario& scenario, long samples,
                                        std::uint64_t seed, int jobs = 1);

}  // namespace mm
