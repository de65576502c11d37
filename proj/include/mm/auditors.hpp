#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mm/engine.hpp"
#include "mm/oracles.hpp"
#include "mm/strategy.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// Reports

struct Statistic {
    std::string name;
    double value = 0.0;
    std::optional<double> stderr_mean;
};

/// Everything needed to replay the worst violation deterministically: the
/// realization (seed or enumerated outcome), the offending agents, and the
/// exact deviation schedules that were applied.
struct AuditWitness {
    std::uint64_t realization_seed = 0;
    std::optional<std::size_t> outcome_index;
    std::uint64_t run_seed = 0;
    AgentId agent;
    AgentId partner;
    GroupRef group = -1;
    std::string deviation_desc;
    /// Resolvable strategy ids per deviating agent; replay rebuilds the
    /// deviation from these, so type-dependent deviations survive.
    std::map<AgentId, std::string> deviation_ids;
    /// Deviation schedules instantiated at the witness realization.
    std::map<AgentId, BidSchedule> overrides;
    double lhs = 0.0;
    double rhs = 0.0;
    double violation = 0.0;  // how far the checked inequality failed
};

struct AuditReport {
    std::string audit_name;
    bool pass = true;
    std::vector<Statistic> statistics;
    std::optional<AuditWitness> witness;
    long samples = 0;
    std::uint64_t seed = 0;
    std::string family;  // deviation family the verdict is certified against
    double bound = 0.0;  // stability parameter / lemma constant in play
};

/// Finite deviation families for stability and equilibrium certificates.
struct DeviationFamily {
    enum class Kind { HalfValue, ZeroThenInspect, PairwiseTruthful, ConstantGrid };
    Kind kind = Kind::ConstantGrid;
    std::vector<GridPoint> bidder_points;  // ConstantGrid only
    std::vector<GridPoint> asker_points;   // defaults to bidder_points when empty
    std::size_t cap_per_agent = 200;

    static DeviationFamily pairwise_truthful();
    static DeviationFamily half_value();
    static DeviationFamily zero_then_inspect();
    static DeviationFamily constant_grid(std::vector<GridPoint> points);
    /// Absolute bid/ask levels (asks are negated into engine space).
    static DeviationFamily absolute_levels(const std::vector<double>& bids,
                                           const std::vector<double>& asks);
    std::string describe() const;
};

enum class SmoothnessLemma { NonNeg, Group, Inspect, RebatePair };

// ---------------------------------------------------------------------------
// Operations

/// E[welfare] under the profile. Exact (stderr 0) for Degenerate priors.
ExpectedValue expected_welfare(const Scenario& scenario, const StrategyProfile& profile,
                               long samples, std::uint64_t seed, int jobs = 1);

/// Approximate ex post stability: in every sampled realization, every
/// feasible pair's joint utility reaches surplus/k. Finite priors (support
/// up to 10,000 profiles) are enumerated and checked exactly.
AuditReport ex_post_audit(const Scenario& scenario, const StrategyProfile& profile, double k,
                          long samples, std::uint64_t seed);

/// Approximate ex ante stability against a deviation family: no feasible
/// pair can multiply its expected joint utility by more than k via a family
/// deviation.
AuditReport ex_ante_audit(const Scenario& scenario, const StrategyProfile& profile, double k,
                          const DeviationFamily& family, long samples, std::uint64_t seed);

/// Grid equilibrium certificate: no agent improves its expected utility by a
/// unilateral family deviation (beyond noise; exact for finite priors).
AuditReport nash_audit(const Scenario& scenario, const StrategyProfile& profile,
                       const DeviationFamily& family, long samples, std::uint64_t seed);

/// Per-realization smoothness inequalities. These are pointwise claims, so
/// any violation beyond 1e-9 fails the audit.
AuditReport smoothness_check(SmoothnessLemma lemma, const Scenario& scenario,
                             const StrategyProfile& profile, long samples, std::uint64_t seed);

struct PoaReport {
    ExpectedValue welfare;
    ExpectedValue opt;
    double ratio = 0.0;
    double ratio_stderr = 0.0;
    double reference_bound = 0.0;
    std::string bound_name;
};

/// Welfare ratio against the matching oracle, with the bound implied by the
/// scenario shape (1/8 graphs, 1/(2k^2) hypergraphs, 1/(4k) rebate) printed
/// alongside. Faults when the optimum is zero.
PoaReport poa_report(const Scenario& scenario, const StrategyProfile& profile, long samples,
                     std::uint64_t seed, double stability_k = 4.0, int jobs = 1);

struct GridEquilibriumScan {
    long profiles = 0;
    long equilibria = 0;
    double min_equilibrium_welfare = 0.0;
    double min_ratio = 1.0;  // over equilibria, welfare / opt
    double opt = 0.0;
};

/// Exhaustive pure-strategy enumeration over per-agent truthful-scaling
/// strategies (bid = scale * own value on every incident group). A profile
/// is a grid equilibrium when no agent gains more than 1e-9 by switching its
/// scale. Degenerate priors only.
GridEquilibriumScan scan_grid_equilibria(const Scenario& scenario,
                                         const std::vector<double>& scales,
                                         std::uint64_t tie_seed);

struct ReplayResult {
    double violation = 0.0;
    Transcript transcript;
};

/// Re-run a failing report's witness; deterministic, reproduces the recorded
/// violation exactly.
ReplayResult replay_witness(const Scenario& scenario, const StrategyProfile& profile,
                            const AuditReport& report);

inline constexpr double kExactSlack = 1e-9;
inline constexpr std::size_t kEnumerationLimit = 10000;

}  // namespace mm
