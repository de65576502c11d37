#include "mm/market.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mm {

namespace {

std::string group_label(const MarketGraph& graph, GroupRef g) {
    std::ostringstream os;
    os << "group " << g << " {";
    if (g >= 0 && g < static_cast<int>(graph.groups.size())) {
        const auto& members = graph.groups[g];
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) os << ",";
            os << members[i];
        }
    }
    os << "}";
    return os.str();
}

std::string incidence_label(const MarketGraph& graph, const Incidence& inc) {
    return "agent " + inc.agent + ", " + group_label(graph, inc.group);
}

/// All (agent, group) slots of the graph, in canonical order.
std::vector<Incidence> graph_incidences(const MarketGraph& graph) {
    std::vector<Incidence> out;
    for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g)
        for (const auto& a : graph.groups[g]) out.push_back({a, g});
    std::sort(out.begin(), out.end());
    return out;
}

void check_inspectable(const InspectableKind& k, const std::string& where,
                       std::vector<Violation>& out) {
    std::string why;
    if (!k.dist.well_formed(&why)) {
        out.push_back({"distribution: " + why, where});
        return;
    }
    if (k.inspect_cost < 0.0) out.push_back({"inspection cost must be nonnegative", where});
    if (k.dist.min_support() < 0.0)
        out.push_back({"inspection distribution must have nonnegative support", where});
    if (k.dist.mean() < k.inspect_cost) out.push_back({"mean(D) < r", where});
}

void check_entry_kinds(const MarketGraph& graph, const Incidence& inc,
                       const DirectedValuation& val, std::vector<Violation>& out) {
    std::string where = incidence_label(graph, inc);
    if (val.is_cost()) {
        auto side = graph.side_of(inc.agent);
        if (!side || *side != Side::Asker)
            out.push_back({"cost valuation requires an asker-side agent", where});
    } else if (val.is_inspectable()) {
        check_inspectable(val.inspectable(), where, out);
    }
}

void check_coverage(const MarketGraph& graph, const std::vector<Incidence>& have,
                    const std::string& prior_name, std::vector<Violation>& out) {
    std::vector<Incidence> want = graph_incidences(graph);
    std::vector<Incidence> missing, extra;
    std::set_difference(want.begin(), want.end(), have.begin(), have.end(),
                        std::back_inserter(missing));
    std::set_difference(have.begin(), have.end(), want.begin(), want.end(),
                        std::back_inserter(extra));
    for (const auto& inc : missing)
        out.push_back({prior_name + " misses an incidence", incidence_label(graph, inc)});
    for (const auto& inc : extra)
        out.push_back({prior_name + " has an entry outside the graph", incidence_label(graph, inc)});
}

}  // namespace

int MarketGraph::agent_index(const AgentId& a) const {
    for (std::size_t i = 0; i < agents.size(); ++i)
        if (agents[i] == a) return static_cast<int>(i);
    return -1;
}

std::vector<GroupRef> MarketGraph::incident_groups(const AgentId& a) const {
    std::vector<GroupRef> out;
    for (GroupRef g = 0; g < static_cast<int>(groups.size()); ++g)
        if (std::find(groups[g].begin(), groups[g].end(), a) != groups[g].end()) out.push_back(g);
    return out;
}

const RealizedValuation& TypeProfile::at(const AgentId& a, GroupRef g) const {
    auto it = entries.find({a, g});
    if (it == entries.end())
        throw Fault("type profile has no valuation for agent " + a + " on group " +
                    std::to_string(g));
    return it->second;
}

const RealizedValuation* TypeProfile::find(const AgentId& a, GroupRef g) const {
    auto it = entries.find({a, g});
    return it == entries.end() ? nullptr : &it->second;
}

ValidationResult validate_scenario(const Scenario& s) {
    ValidationResult res;
    auto& out = res.violations;
    const MarketGraph& graph = s.graph;

    // Graph shape.
    if (graph.agents.empty()) out.push_back({"graph has no agents", "graph"});
    {
        std::set<AgentId> seen;
        for (const auto& a : graph.agents)
            if (!seen.insert(a).second) out.push_back({"duplicate agent id", "agent " + a});
    }
    if (graph.max_group_size < 2) out.push_back({"maxGroupSize must be at least 2", "graph"});

    std::set<std::set<AgentId>> group_sets;
    for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g) {
        const Group& members = graph.groups[g];
        std::set<AgentId> uniq(members.begin(), members.end());
        std::string where = group_label(graph, g);
        if (uniq.size() != members.size()) out.push_back({"group repeats a member", where});
        if (static_cast<int>(uniq.size()) < 2 ||
            static_cast<int>(uniq.size()) > graph.max_group_size)
            out.push_back({"group size outside [2, maxGroupSize]", where});
        for (const auto& a : members)
            if (graph.agent_index(a) < 0) out.push_back({"group member not in agents", where});
        if (!group_sets.insert(uniq).second) out.push_back({"duplicate group", where});
    }

    // Side labels.
    if (graph.has_side_labels()) {
        for (const auto& a : graph.agents)
            if (!graph.side_of(a)) out.push_back({"agent missing a side label", "agent " + a});
        for (const auto& [a, side] : graph.side_labels) {
            (void)side;
            if (graph.agent_index(a) < 0)
                out.push_back({"side label for unknown agent", "agent " + a});
        }
        for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g) {
            const Group& members = graph.groups[g];
            if (members.size() != 2) continue;
            auto sa = graph.side_of(members[0]);
            auto sb = graph.side_of(members[1]);
            if (sa && sb && *sa == *sb)
                out.push_back({"edge must pair one bidder with one asker", group_label(graph, g)});
        }
    }

    if (s.payment_rule == PaymentRule::QuarterRebate) {
        if (!graph.has_side_labels())
            out.push_back({"rebate requires side labels", "paymentRule"});
        for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g)
            if (graph.groups[g].size() != 2)
                out.push_back({"rebate rule is defined for pairs only", group_label(graph, g)});
    }

    if (s.p_max && *s.p_max <= 0.0) out.push_back({"clock pMax must be positive", "clock"});

    // Prior.
    if (auto* deg = std::get_if<DegeneratePrior>(&s.prior)) {
        std::vector<Incidence> have;
        for (const auto& [inc, val] : deg->profile.entries) {
            have.push_back(inc);
            check_entry_kinds(graph, inc, val.spec, out);
        }
        check_coverage(graph, have, "degenerate prior", out);
    } else if (auto* ind = std::get_if<IndependentEntriesPrior>(&s.prior)) {
        std::vector<Incidence> have;
        for (const auto& [inc, spec] : ind->entries) {
            have.push_back(inc);
            std::string where = incidence_label(graph, inc);
            std::string why;
            if (!spec.dist.well_formed(&why)) out.push_back({"distribution: " + why, where});
            if (spec.kind == EntrySpec::Kind::Cost) {
                auto side = graph.side_of(inc.agent);
                if (!side || *side != Side::Asker)
                    out.push_back({"cost valuation requires an asker-side agent", where});
            } else if (spec.kind == EntrySpec::Kind::Inspectable) {
                check_inspectable(InspectableKind{spec.inspect_cost, spec.dist}, where, out);
            }
        }
        check_coverage(graph, have, "independent-entries prior", out);
    } else if (auto* joint = std::get_if<ExplicitJointPrior>(&s.prior)) {
        double total = 0.0;
        if (joint->outcomes.empty()) out.push_back({"joint prior has no outcomes", "prior"});
        for (std::size_t i = 0; i < joint->outcomes.size(); ++i) {
            const auto& [profile, prob] = joint->outcomes[i];
            total += prob;
            if (prob < 0.0)
                out.push_back({"negative outcome probability", "outcome " + std::to_string(i)});
            std::vector<Incidence> have;
            for (const auto& [inc, val] : profile.entries) {
                have.push_back(inc);
                check_entry_kinds(graph, inc, val.spec, out);
            }
            check_coverage(graph, have, "joint outcome " + std::to_string(i), out);
        }
        if (!joint->outcomes.empty() && std::abs(total - 1.0) > kProbTol)
            out.push_back({"joint probabilities sum to " + std::to_string(total), "prior"});
    }

    return res;
}

namespace {

RealizedValuation realize_entry(const EntrySpec& spec, Rng& rng) {
    RealizedValuation out;
    switch (spec.kind) {
        case EntrySpec::Kind::Value:
            out.spec.kind = ValueKind{spec.dist.sample(rng)};
            break;
        case EntrySpec::Kind::Cost:
            out.spec.kind = CostKind{spec.dist.sample(rng)};
            break;
        case EntrySpec::Kind::Inspectable:
            out.spec.kind = InspectableKind{spec.inspect_cost, spec.dist};
            out.drawn = spec.dist.sample(rng);
            break;
    }
    return out;
}

}  // namespace

TypeProfile realize_types(const TypePrior& prior, std::uint64_t seed) {
    if (auto* deg = std::get_if<DegeneratePrior>(&prior)) return deg->profile;
    if (auto* ind = std::get_if<IndependentEntriesPrior>(&prior)) {
        TypeProfile out;
        Rng rng(seed);
        // std::map iteration order is the canonical incidence order, so one
        // stream realizes entries reproducibly.
        for (const auto& [inc, spec] : ind->entries) out.entries[inc] = realize_entry(spec, rng);
        return out;
    }
    const auto& joint = std::get<ExplicitJointPrior>(prior);
    Rng rng(seed);
    double u = rng.next_double();
    double acc = 0.0;
    for (const auto& [profile, prob] : joint.outcomes) {
        acc += prob;
        if (u < acc) return profile;
    }
    if (joint.outcomes.empty()) throw Fault("realize_types: joint prior has no outcomes");
    return joint.outcomes.back().first;
}

double surplus(const TypeProfile& profile, const MarketGraph& graph, GroupRef group) {
    if (group < 0 || group >= static_cast<int>(graph.groups.size()))
        throw Fault("surplus: no such group");
    double s = 0.0;
    for (const auto& a : graph.groups[group]) s += profile.at(a, group).signed_value();
    return s;
}

std::optional<std::size_t> finite_support_size(const TypePrior& prior, std::size_t limit) {
    if (std::holds_alternative<DegeneratePrior>(prior)) return 1;
    if (auto* joint = std::get_if<ExplicitJointPrior>(&prior)) {
        std::size_t n = joint->outcomes.size();
        return n <= limit ? std::optional<std::size_t>(n) : std::nullopt;
    }
    const auto& ind = std::get<IndependentEntriesPrior>(prior);
    std::size_t total = 1;
    for (const auto& [inc, spec] : ind.entries) {
        (void)inc;
        std::size_t card;
        if (spec.dist.as_point())
            card = 1;
        else if (auto* f = spec.dist.as_finite()) {
            card = 0;
            for (const auto& [v, p] : f->atoms) {
                (void)v;
                if (p > 0.0) ++card;
            }
        } else {
            auto* u = spec.dist.as_uniform();
            if (u->lo != u->hi) return std::nullopt;  // continuous
            card = 1;
        }
        if (card == 0) return std::nullopt;
        if (total > limit / card + 1) return std::nullopt;
        total *= card;
        if (total > limit) return std::nullopt;
    }
    return total;
}

std::vector<std::pair<TypeProfile, double>> enumerate_support(const TypePrior& prior,
                                                              std::size_t limit) {
    auto size = finite_support_size(prior, limit);
    if (!size) throw Fault("enumerate_support: prior support is not finite within the limit");
    if (auto* deg = std::get_if<DegeneratePrior>(&prior)) return {{deg->profile, 1.0}};
    if (auto* joint = std::get_if<ExplicitJointPrior>(&prior)) return joint->outcomes;

    const auto& ind = std::get<IndependentEntriesPrior>(prior);
    std::vector<std::pair<TypeProfile, double>> acc = {{TypeProfile{}, 1.0}};
    for (const auto& [inc, spec] : ind.entries) {
        std::vector<std::pair<double, double>> choices;  // (drawn, probability)
        if (auto* p = spec.dist.as_point())
            choices = {{p->value, 1.0}};
        else if (auto* f = spec.dist.as_finite()) {
            for (const auto& [v, prob] : f->atoms)
                if (prob > 0.0) choices.emplace_back(v, prob);
        } else {
            choices = {{spec.dist.as_uniform()->lo, 1.0}};
        }
        std::vector<std::pair<TypeProfile, double>> next;
        next.reserve(acc.size() * choices.size());
        for (const auto& [profile, prob] : acc) {
            for (const auto& [v, p] : choices) {
                TypeProfile np = profile;
                RealizedValuation rv;
                switch (spec.kind) {
                    case EntrySpec::Kind::Value:
                        rv.spec.kind = ValueKind{v};
                        break;
                    case EntrySpec::Kind::Cost:
                        rv.spec.kind = CostKind{v};
                        break;
                    case EntrySpec::Kind::Inspectable:
                        rv.spec.kind = InspectableKind{spec.inspect_cost, spec.dist};
                        rv.drawn = v;
                        break;
                }
                np.entries[inc] = rv;
                next.emplace_back(std::move(np), prob * p);
            }
        }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace mm
