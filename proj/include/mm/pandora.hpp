#pragma once

#include <vector>

#include "mm/engine.hpp"
#include "mm/market.hpp"

namespace mm {

/// Strike price sigma for an inspection option: the threshold at which the
/// expected excess value equals the inspection cost, E[(v - sigma)^+] = r.
/// Closed form for point masses and uniform intervals; bisection on
/// [0, max support] for finite supports. Where the residual is flat (r = 0),
/// the largest solution in range — the essential max — is returned.
/// Faults when mean(D) < r: no nonnegative sigma exists.
double strike_price(const Distribution& dist, double inspect_cost);

/// min(sigma, v).
double covered_call(double value, double strike);

struct PandoraIndex {
    AgentId agent;
    GroupRef group = -1;
    double strike = 0.0;
    double inspect_cost = 0.0;
    Distribution dist;
};

struct CoveredCallRecord {
    double kappa = 0.0;
    double strike = 0.0;
    double drawn = 0.0;
};

/// Strike prices for every Inspectable incidence of a profile.
std::vector<PandoraIndex> pandora_indices(const MarketGraph& graph, const TypeProfile& types);

struct ExerciseWitness {
    std::size_t run_index = 0;
    Incidence incidence;
    double drawn = 0.0;
    double strike = 0.0;
};

struct ExerciseAuditReport {
    bool pass = true;
    std::optional<ExerciseWitness> witness;
    long audited = 0;  // inspected incidences examined
};

/// Checks "exercising in the money": no run may leave an inspected,
/// above-strike valuation unmatched. transcripts[k] must come from types[k].
ExerciseAuditReport exercise_audit(const MarketGraph& graph,
                                   const std::vector<Transcript>& transcripts,
                                   const std::vector<TypeProfile>& types);

struct IncidenceGap {
    Incidence incidence;
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_diff = 0.0;
};

struct CoveredCallGap {
    double lhs = 0.0;          // E[A v - I r], summed over incidences
    double rhs = 0.0;          // E[A kappa]
    double stderr_diff = 0.0;  // stderr of the paired difference lhs - rhs
    long samples = 0;
    bool violation = false;  // lhs > rhs beyond 3 stderr, here or per incidence
    std::vector<IncidenceGap> per_incidence;
};

/// Monte Carlo comparison of realized inspection-adjusted value against the
/// covered-call surrogate, aggregated over all Inspectable incidences.
CoveredCallGap covered_call_gap(const Scenario& scenario, const StrategyProfile& profile,
                                long samples, std::uint64_t seed, int jobs = 1);

}  // namespace mm
