#include "mm/oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "mm/pandora.hpp"
#include "mm/parallel.hpp"
#include "mm/rng.hpp"

namespace mm {

namespace {

struct BnbState {
    const WeightedInstance* inst = nullptr;
    std::vector<int> order;          // group indices, weight descending
    std::vector<double> suffix_sum;  // positive weight remaining from position k
    std::vector<std::uint64_t> group_masks;
    double best_weight = 0.0;
    std::uint64_t best_set = 0;  // bitmask over order positions

    void search(std::size_t k, std::uint64_t used_agents, double acc, std::uint64_t chosen) {
        if (acc > best_weight) {
            best_weight = acc;
            best_set = chosen;
        }
        if (k >= order.size()) return;
        if (acc + suffix_sum[k] <= best_weight) return;
        int g = order[k];
        std::uint64_t mask = group_masks[g];
        if ((used_agents & mask) == 0 && inst->weights[g] > 0.0)
            search(k + 1, used_agents | mask, acc + inst->weights[g],
                   chosen | (std::uint64_t{1} << k));
        search(k + 1, used_agents, acc, chosen);
    }
};

std::uint64_t mask_of(const std::vector<int>& members) {
    std::uint64_t m = 0;
    for (int a : members) m |= std::uint64_t{1} << a;
    return m;
}

}  // namespace

MatchingResult max_weight_matching(const WeightedInstance& inst) {
    if (inst.num_agents > kMaxOracleAgents)
        throw Fault("max_weight_matching: more than " + std::to_string(kMaxOracleAgents) +
                    " agents exceeds the exhaustive-search budget");
    // Nonpositive-weight groups are never part of an optimum (the empty
    // matching is feasible), so only positive groups count against the
    // search budget.
    std::vector<int> positive;
    for (std::size_t g = 0; g < inst.groups.size(); ++g)
        if (inst.weights[g] > 0.0) positive.push_back(static_cast<int>(g));
    if (static_cast<int>(positive.size()) > kMaxOracleGroups)
        throw Fault("max_weight_matching: more than " + std::to_string(kMaxOracleGroups) +
                    " groups exceeds the exhaustive-search budget");

    BnbState st;
    st.inst = &inst;
    st.order = std::move(positive);
    std::sort(st.order.begin(), st.order.end(),
              [&](int a, int b) { return inst.weights[a] > inst.weights[b]; });
    st.suffix_sum.assign(st.order.size() + 1, 0.0);
    for (std::size_t k = st.order.size(); k-- > 0;)
        st.suffix_sum[k] = st.suffix_sum[k + 1] + inst.weights[st.order[k]];
    st.group_masks.resize(inst.groups.size());
    for (std::size_t g = 0; g < inst.groups.size(); ++g)
        st.group_masks[g] = mask_of(inst.groups[g]);

    st.search(0, 0, 0.0, 0);

    MatchingResult res;
    res.total_weight = st.best_weight;
    for (std::size_t k = 0; k < st.order.size(); ++k)
        if (st.best_set & (std::uint64_t{1} << k)) res.chosen.push_back(st.order[k]);
    std::sort(res.chosen.begin(), res.chosen.end());
    return res;
}

MatchingResult greedy_matching(const WeightedInstance& inst, std::uint64_t tie_seed) {
    std::vector<int> order(inst.groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (inst.weights[a] != inst.weights[b]) return inst.weights[a] > inst.weights[b];
        auto pa = tie_priority(tie_seed, a), pb = tie_priority(tie_seed, b);
        if (pa != pb) return pa < pb;
        return a < b;
    });
    MatchingResult res;
    std::uint64_t used = 0;
    for (int g : order) {
        if (inst.weights[g] <= 0.0) break;
        std::uint64_t mask = mask_of(inst.groups[g]);
        if (used & mask) continue;
        used |= mask;
        res.chosen.push_back(g);
        res.total_weight += inst.weights[g];
    }
    return res;
}

namespace {

WeightedInstance instance_shell(const MarketGraph& graph) {
    WeightedInstance inst;
    inst.num_agents = static_cast<int>(graph.agents.size());
    if (inst.num_agents > kMaxOracleAgents)
        throw Fault("oracle instance: too many agents for bitmask search");
    inst.groups.reserve(graph.groups.size());
    for (const auto& members : graph.groups) {
        std::vector<int> idx;
        for (const auto& a : members) idx.push_back(graph.agent_index(a));
        inst.groups.push_back(std::move(idx));
    }
    inst.weights.assign(graph.groups.size(), 0.0);
    return inst;
}

}  // namespace

WeightedInstance surplus_instance(const MarketGraph& graph, const TypeProfile& types) {
    WeightedInstance inst = instance_shell(graph);
    for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g)
        inst.weights[g] = surplus(types, graph, g);
    return inst;
}

WeightedInstance covered_call_instance(const MarketGraph& graph, const TypeProfile& types) {
    WeightedInstance inst = instance_shell(graph);
    for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g) {
        double w = 0.0;
        for (const auto& a : graph.groups[g]) {
            const auto& entry = types.at(a, g);
            if (entry.is_inspectable()) {
                const auto& ins = entry.spec.inspectable();
                w += covered_call(entry.drawn, strike_price(ins.dist, ins.inspect_cost));
            } else {
                w += entry.signed_value();
            }
        }
        inst.weights[g] = w;
    }
    return inst;
}

namespace {

constexpr std::size_t kOptEnumerationLimit = 10000;

ExpectedValue expected_matching_value(const Scenario& scenario, long samples, std::uint64_t seed,
                                      bool covered, int jobs) {
    ExpectedValue out;
    auto weight_of = [&](const TypeProfile& types) {
        WeightedInstance inst = covered ? covered_call_instance(scenario.graph, types)
                                        : surplus_instance(scenario.graph, types);
        return max_weight_matching(inst).total_weight;
    };
    // Finite priors are integrated exactly.
    if (finite_support_size(scenario.prior, kOptEnumerationLimit)) {
        auto support = enumerate_support(scenario.prior, kOptEnumerationLimit);
        double mean = 0.0;
        for (const auto& [types, prob] : support) mean += prob * weight_of(types);
        out.mean = mean;
        out.samples = static_cast<long>(support.size());
        return out;
    }
    auto values = parallel_map<double>(samples, jobs, [&](long s) {
        return weight_of(
            realize_types(scenario.prior, derive_seed(seed, static_cast<std::uint64_t>(s))));
    });
    RunningStat stat;
    for (double v : values) stat.add(v);
    out.mean = stat.mean();
    out.stderr_mean = stat.stderr_mean();
    out.samples = samples;
    return out;
}

}  // namespace

ExpectedValue expected_opt(const Scenario& scenario, long samples, std::uint64_t seed, int jobs) {
    return expected_matching_value(scenario, samples, seed, false, jobs);
}

ExpectedValue expected_covered_call_opt(const Scenario& scenario, long samples,
                                        std::uint64_t seed, int jobs) {
    return expected_matching_value(scenario, samples, seed, true, jobs);
}

}  // namespace mm
