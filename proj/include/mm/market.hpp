#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mm/clock.hpp"
#include "mm/common.hpp"
#include "mm/distribution.hpp"

namespace mm {

/// A feasible group of agents. Size-2 groups are graph edges; larger groups
/// are hyperedges. Members are kept sorted and unique.
using Group = std::vector<AgentId>;

struct MarketGraph {
    std::vector<AgentId> agents;
    std::vector<Group> groups;
    int max_group_size = 2;
    std::map<AgentId, Side> side_labels;  // empty when the market is one-kind

    bool has_side_labels() const { return !side_labels.empty(); }
    std::optional<Side> side_of(const AgentId& a) const {
        auto it = side_labels.find(a);
        if (it == side_labels.end()) return std::nullopt;
        return it->second;
    }
    int agent_index(const AgentId& a) const;
    /// Group indices containing the agent.
    std::vector<GroupRef> incident_groups(const AgentId& a) const;
};

// ---------------------------------------------------------------------------
// Valuations

struct ValueKind {
    double value = 0.0;
};
struct CostKind {
    double cost = 0.0;
};
struct InspectableKind {
    double inspect_cost = 0.0;  // r >= 0
    Distribution dist;          // over nonnegative reals, mean >= r
};

/// One agent's valuation for one group. Realized profiles carry, for
/// Inspectable entries, the value already drawn but still hidden from the
/// agent until inspection.
struct DirectedValuation {
    std::variant<ValueKind, CostKind, InspectableKind> kind;

    bool is_value() const { return std::holds_alternative<ValueKind>(kind); }
    bool is_cost() const { return std::holds_alternative<CostKind>(kind); }
    bool is_inspectable() const { return std::holds_alternative<InspectableKind>(kind); }
    const InspectableKind& inspectable() const { return std::get<InspectableKind>(kind); }
};

struct RealizedValuation {
    DirectedValuation spec;
    double drawn = 0.0;  // meaningful only for Inspectable entries

    /// Value in engine sign convention: costs enter negated, so the engine
    /// only ever sees values and bids. This is the single sign adapter.
    double signed_value() const {
        if (auto* v = std::get_if<ValueKind>(&spec.kind)) return v->value;
        if (auto* c = std::get_if<CostKind>(&spec.kind)) return -c->cost;
        return drawn;
    }
    bool is_inspectable() const { return spec.is_inspectable(); }
};

struct TypeProfile {
    std::map<Incidence, RealizedValuation> entries;

    const RealizedValuation& at(const AgentId& a, GroupRef g) const;
    const RealizedValuation* find(const AgentId& a, GroupRef g) const;
};

// ---------------------------------------------------------------------------
// Priors

/// Template for one incidence of an IndependentEntries prior. The declared
/// kind says what the drawn number becomes; Inspectable keeps (r, dist) and
/// the realization draws the hidden value.
struct EntrySpec {
    enum class Kind { Value, Cost, Inspectable };
    Kind kind = Kind::Value;
    Distribution dist;
    double inspect_cost = 0.0;  // r, Inspectable only
};

struct DegeneratePrior {
    TypeProfile profile;
};
struct IndependentEntriesPrior {
    std::map<Incidence, EntrySpec> entries;
};
struct ExplicitJointPrior {
    std::vector<std::pair<TypeProfile, double>> outcomes;  // probabilities sum to 1
};

using TypePrior = std::variant<DegeneratePrior, IndependentEntriesPrior, ExplicitJointPrior>;

// ---------------------------------------------------------------------------
// Scenario

struct Scenario {
    MarketGraph graph;
    TypePrior prior;
    PaymentRule payment_rule = PaymentRule::PayYourBid;
    std::optional<double> p_max;  // clock cap; engine default used when absent
    std::uint64_t default_seed = 0;
};

struct Violation {
    std::string invariant;  // which rule was broken
    std::string location;   // offending agent/group/entry
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// ---------------------------------------------------------------------------
// Operations

ValidationResult validate_scenario(const Scenario& s);

/// Deterministic realization of a prior: same (prior, seed) gives the same
/// profile byte for byte. Degenerate priors ignore the seed.
TypeProfile realize_types(const TypePrior& prior, std::uint64_t seed);

/// Sum of signed values over the group's members. Faults on a missing entry.
double surplus(const TypeProfile& profile, const MarketGraph& graph, GroupRef group);

/// Number of distinct profiles a prior can produce, if finite and not huge.
/// Used to decide between exact enumeration and sampling in the auditors.
std::optional<std::size_t> finite_support_size(const TypePrior& prior, std::size_t limit);

/// Enumerate (profile, probability) pairs; precondition: finite_support_size
/// returned a value for the same limit.
std::vector<std::pair<TypeProfile, double>> enumerate_support(const TypePrior& prior,
                                                              std::size_t limit);

}  // namespace mm
