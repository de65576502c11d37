#include "mm/instances.hpp"

#include <algorithm>
#include <set>

#include "mm/rng.hpp"

namespace mm {
namespace instances {

namespace {

GroupRef add_edge(MarketGraph& graph, const AgentId& a, const AgentId& b) {
    Group g{a, b};
    std::sort(g.begin(), g.end());
    graph.groups.push_back(g);
    return static_cast<GroupRef>(graph.groups.size() - 1);
}

void set_value(TypeProfile& p, const AgentId& a, GroupRef g, double v) {
    p.entries[{a, g}] = RealizedValuation{DirectedValuation{ValueKind{v}}, 0.0};
}
void set_cost(TypeProfile& p, const AgentId& a, GroupRef g, double c) {
    p.entries[{a, g}] = RealizedValuation{DirectedValuation{CostKind{c}}, 0.0};
}

}  // namespace

Scenario refusal_scenario(int nb, int na) {
    Scenario s;
    MarketGraph& graph = s.graph;
    for (int i = 0; i < nb; ++i) {
        graph.agents.push_back("B" + std::to_string(i + 1));
        graph.side_labels[graph.agents.back()] = Side::Bidder;
    }
    for (int j = 0; j < na; ++j) {
        graph.agents.push_back("A" + std::to_string(j + 1));
        graph.side_labels[graph.agents.back()] = Side::Asker;
    }
    TypeProfile types;
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < na; ++j) {
            GroupRef g = add_edge(graph, "B" + std::to_string(i + 1), "A" + std::to_string(j + 1));
            set_value(types, "B" + std::to_string(i + 1), g, 2.0);
            set_cost(types, "A" + std::to_string(j + 1), g, 1.0);
        }
    }
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::QuarterRebate;
    s.default_seed = 20;
    return s;
}

Scenario fig1_scenario(double k) {
    Scenario s;
    MarketGraph& graph = s.graph;
    graph.agents = {"A", "B", "C"};
    graph.side_labels = {{"A", Side::Bidder}, {"B", Side::Bidder}, {"C", Side::Asker}};
    GroupRef ac = add_edge(graph, "A", "C");
    GroupRef bc = add_edge(graph, "B", "C");
    TypeProfile types;
    set_value(types, "A", ac, k + 1.0);
    set_cost(types, "C", ac, 0.0);
    set_value(types, "B", bc, k);
    set_cost(types, "C", bc, 0.0);
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::QuarterRebate;
    s.default_seed = 1;
    return s;
}

Scenario pandora_binary_scenario() {
    Scenario s;
    MarketGraph& graph = s.graph;
    graph.agents = {"I", "J"};
    GroupRef e = add_edge(graph, "I", "J");
    IndependentEntriesPrior prior;
    prior.entries[{"I", e}] =
        EntrySpec{EntrySpec::Kind::Inspectable, Distribution::finite({{0.0, 0.5}, {10.0, 0.5}}),
                  1.0};
    prior.entries[{"J", e}] =
        EntrySpec{EntrySpec::Kind::Inspectable, Distribution::point(0.0), 0.0};
    s.prior = std::move(prior);
    s.payment_rule = PaymentRule::PayYourBid;
    s.default_seed = 8;
    return s;
}

Scenario group_demo_scenario() {
    Scenario s;
    MarketGraph& graph = s.graph;
    graph.agents = {"a", "b", "c", "d", "e", "f"};
    graph.max_group_size = 3;
    graph.groups = {{"a", "b", "c"}, {"c", "d", "e"}, {"d", "e", "f"}};
    TypeProfile types;
    const double per_member[3] = {3.0, 2.0, 1.0};
    for (GroupRef g = 0; g < 3; ++g)
        for (const auto& a : graph.groups[g]) set_value(types, a, g, per_member[g]);
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::PayYourBid;
    s.default_seed = 3;
    return s;
}

Scenario lovers_scenario(int n) {
    Scenario s;
    MarketGraph& graph = s.graph;
    for (int i = 0; i < n; ++i) {
        graph.agents.push_back("B" + std::to_string(i));
        graph.side_labels[graph.agents.back()] = Side::Bidder;
    }
    for (int j = 0; j < n; ++j) {
        graph.agents.push_back("A" + std::to_string(j));
        graph.side_labels[graph.agents.back()] = Side::Asker;
    }
    std::vector<std::vector<GroupRef>> edge(n, std::vector<GroupRef>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            edge[i][j] = add_edge(graph, "B" + std::to_string(i), "A" + std::to_string(j));

    // One outcome per cyclic shift: bidder i is fated to asker (i + d) mod n.
    ExplicitJointPrior prior;
    for (int d = 0; d < n; ++d) {
        TypeProfile types;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                bool fated = j == (i + d) % n;
                set_value(types, "B" + std::to_string(i), edge[i][j], fated ? 10.0 : 1.0);
                set_cost(types, "A" + std::to_string(j), edge[i][j], fated ? 0.0 : 1.0);
            }
        }
        prior.outcomes.emplace_back(std::move(types), 1.0 / n);
    }
    s.prior = std::move(prior);
    s.payment_rule = PaymentRule::QuarterRebate;
    s.default_seed = 12;
    return s;
}

StrategyProfile lovers_profile(const MarketGraph& graph) {
    // Truthful on the identity pairing B_i -- A_i, refuse everywhere else:
    // the mechanism then always produces the same matching no matter which
    // pairing fate picked.
    StrategyProfile profile;
    for (const auto& agent : graph.agents) {
        std::string partner = (agent[0] == 'B' ? "A" : "B") + agent.substr(1);
        GroupRef own = -1;
        for (GroupRef g : graph.incident_groups(agent)) {
            const Group& members = graph.groups[g];
            if (std::find(members.begin(), members.end(), partner) != members.end()) own = g;
        }
        profile.ctors[agent] = [own](const AgentView& view) {
            std::map<GroupRef, double> bids;
            for (const auto& [g, val] : view.entries)
                bids[g] = g == own ? val.signed_value() : -1000.0;
            return constant_schedule(view.id, bids);
        };
    }
    return profile;
}

Scenario random_nonneg_graph(std::uint64_t seed, int max_agents) {
    Rng rng(derive_seed(seed, 0x6e6f6e6e6567ULL));
    int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_agents - 2)));
    Scenario s;
    MarketGraph& graph = s.graph;
    for (int i = 0; i < n; ++i) graph.agents.push_back("a" + std::to_string(i));

    std::vector<std::pair<int, int>> candidates;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) candidates.push_back({i, j});
    rng.shuffle(candidates);
    TypeProfile types;
    for (const auto& [i, j] : candidates) {
        if (graph.groups.size() >= 16) break;
        if (rng.next_double() < 0.5 && !graph.groups.empty()) continue;
        GroupRef g = add_edge(graph, graph.agents[i], graph.agents[j]);
        set_value(types, graph.agents[i], g, rng.uniform(0.0, 10.0));
        set_value(types, graph.agents[j], g, rng.uniform(0.0, 10.0));
    }
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::PayYourBid;
    s.default_seed = seed;
    return s;
}

Scenario random_bipartite_rebate(std::uint64_t seed, int max_side) {
    Rng rng(derive_seed(seed, 0x72656261746520ULL));
    int nb = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side - 1)));
    int na = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side - 1)));
    Scenario s;
    MarketGraph& graph = s.graph;
    for (int i = 0; i < nb; ++i) {
        graph.agents.push_back("B" + std::to_string(i));
        graph.side_labels[graph.agents.back()] = Side::Bidder;
    }
    for (int j = 0; j < na; ++j) {
        graph.agents.push_back("A" + std::to_string(j));
        graph.side_labels[graph.agents.back()] = Side::Asker;
    }
    TypeProfile types;
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < na; ++j) {
            if (rng.next_double() < 0.2 && j > 0 && i > 0) continue;  // a few missing edges
            GroupRef g = add_edge(graph, "B" + std::to_string(i), "A" + std::to_string(j));
            set_value(types, "B" + std::to_string(i), g, rng.uniform(0.0, 10.0));
            set_cost(types, "A" + std::to_string(j), g, rng.uniform(0.0, 8.0));
        }
    }
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::QuarterRebate;
    s.default_seed = seed;
    return s;
}

Scenario bipartite_game(int nb, int na, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x67616d65ULL));
    Scenario s;
    MarketGraph& graph = s.graph;
    for (int i = 0; i < nb; ++i) graph.agents.push_back("L" + std::to_string(i));
    for (int j = 0; j < na; ++j) graph.agents.push_back("R" + std::to_string(j));
    TypeProfile types;
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < na; ++j) {
            GroupRef g = add_edge(graph, "L" + std::to_string(i), "R" + std::to_string(j));
            set_value(types, "L" + std::to_string(i), g, rng.uniform(0.0, 10.0));
            set_value(types, "R" + std::to_string(j), g, rng.uniform(0.0, 10.0));
        }
    }
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::PayYourBid;
    s.default_seed = seed;
    return s;
}

Scenario random_hypergraph3(std::uint64_t seed, int max_agents) {
    Rng rng(derive_seed(seed, 0x337567726170ULL));
    int n = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_agents - 3)));
    Scenario s;
    MarketGraph& graph = s.graph;
    graph.max_group_size = 3;
    for (int i = 0; i < n; ++i) graph.agents.push_back("a" + std::to_string(i));

    int target = 3 + static_cast<int>(rng.below(4));
    std::set<std::set<int>> chosen;
    TypeProfile types;
    for (int attempts = 0; static_cast<int>(chosen.size()) < target && attempts < 100; ++attempts) {
        std::set<int> triple;
        while (triple.size() < 3) triple.insert(static_cast<int>(rng.below(n)));
        if (!chosen.insert(triple).second) continue;
        Group members;
        for (int i : triple) members.push_back(graph.agents[i]);
        std::sort(members.begin(), members.end());
        graph.groups.push_back(members);
        GroupRef g = static_cast<GroupRef>(graph.groups.size() - 1);
        for (const auto& a : members) set_value(types, a, g, rng.uniform(0.0, 10.0));
    }
    s.prior = DegeneratePrior{std::move(types)};
    s.payment_rule = PaymentRule::PayYourBid;
    s.default_seed = seed;
    return s;
}

Scenario random_inspection_scenario(std::uint64_t seed, int max_agents) {
    Rng rng(derive_seed(seed, 0x696e7370656374ULL));
    int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_agents - 2)));
    Scenario s;
    MarketGraph& graph = s.graph;
    for (int i = 0; i < n; ++i) graph.agents.push_back("a" + std::to_string(i));

    std::vector<std::pair<int, int>> candidates;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) candidates.push_back({i, j});
    rng.shuffle(candidates);
    IndependentEntriesPrior prior;
    for (const auto& [i, j] : candidates) {
        if (graph.groups.size() >= 4) break;  // keeps the joint support enumerable
        if (rng.next_double() < 0.4 && !graph.groups.empty()) continue;
        GroupRef g = add_edge(graph, graph.agents[i], graph.agents[j]);
        for (const auto& a : {graph.agents[i], graph.agents[j]}) {
            double lo = rng.uniform(0.0, 2.0);
            double hi = rng.uniform(4.0, 10.0);
            Distribution dist = Distribution::finite({{lo, 0.5}, {hi, 0.5}});
            double r = rng.uniform(0.0, 0.8 * dist.mean());
            prior.entries[{a, g}] = EntrySpec{EntrySpec::Kind::Inspectable, dist, r};
        }
    }
    s.prior = std::move(prior);
    s.payment_rule = PaymentRule::PayYourBid;
    s.default_seed = seed;
    return s;
}

StrategyProfile random_constant_profile(const Scenario& scenario, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x70726f66696c65ULL));
    static const double scales[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    StrategyProfile profile;
    for (const auto& agent : scenario.graph.agents) {
        std::map<GroupRef, GridPoint> coeffs;
        for (GroupRef g : scenario.graph.incident_groups(agent))
            coeffs[g] = GridPoint{scales[rng.below(5)], 0.0};
        profile.ctors[agent] = linear_ctor(std::move(coeffs));
    }
    return profile;
}

}  // namespace instances
}  // namespace mm
