#include "mm/strategy.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mm/pandora.hpp"
#include "mm/rng.hpp"

namespace mm {

namespace {

BidSchedule constant_for_view(const AgentView& view,
                              const std::function<double(const RealizedValuation&)>& bid_of) {
    BidSchedule s;
    s.owner = view.id;
    for (const auto& [g, val] : view.entries) s.per_group[g] = {Breakpoint{.bid = bid_of(val)}};
    return s;
}

}  // namespace

BidSchedule truthful(const AgentView& view) {
    for (const auto& [g, val] : view.entries)
        if (val.is_inspectable())
            throw Fault("truthful: undefined for uninspected valuations (agent " + view.id + ")");
    return constant_for_view(view, [](const RealizedValuation& v) { return v.signed_value(); });
}

BidSchedule half_value(const AgentView& view) {
    for (const auto& [g, val] : view.entries) {
        if (!val.spec.is_value())
            throw Fault("half_value: requires plain value entries (agent " + view.id + ")");
        if (val.signed_value() < 0.0)
            throw Fault("half_value: negative value (agent " + view.id + ")");
    }
    return constant_for_view(view,
                             [](const RealizedValuation& v) { return v.signed_value() / 2.0; });
}

BidSchedule zero_then_inspect(const AgentView& view) {
    BidSchedule s;
    s.owner = view.id;
    for (const auto& [g, val] : view.entries) {
        if (!val.is_inspectable())
            throw Fault("zero_then_inspect: entry is not inspectable (agent " + view.id + ")");
        const auto& ins = val.spec.inspectable();
        double sigma = strike_price(ins.dist, ins.inspect_cost);
        if (sigma < 0.0) throw Fault("zero_then_inspect: negative strike price");
        s.per_group[g] = {Breakpoint{.bid = 0.0}};
        s.reactive.push_back(InspectTrigger{.group = g,
                                            .trigger_price = sigma / 2.0,
                                            .mode = InspectTrigger::PostBid::CoveredCallScale,
                                            .scale = 0.5,
                                            .offset = 0.0,
                                            .strike = sigma});
    }
    return s;
}

BidSchedule constant_schedule(const AgentId& owner, const std::map<GroupRef, double>& bids) {
    BidSchedule s;
    s.owner = owner;
    for (const auto& [g, b] : bids) s.per_group[g] = {Breakpoint{.bid = b}};
    return s;
}

StrategyCtor truthful_ctor() {
    return [](const AgentView& v) { return truthful(v); };
}
StrategyCtor half_value_ctor() {
    return [](const AgentView& v) { return half_value(v); };
}
StrategyCtor zero_then_inspect_ctor() {
    return [](const AgentView& v) { return zero_then_inspect(v); };
}
StrategyCtor constant_ctor(double bid) {
    return [bid](const AgentView& v) {
        std::map<GroupRef, double> bids;
        for (const auto& [g, val] : v.entries) {
            (void)val;
            bids[g] = bid;
        }
        return constant_schedule(v.id, bids);
    };
}
StrategyCtor constant_map_ctor(std::map<GroupRef, double> bids) {
    return [bids = std::move(bids)](const AgentView& v) {
        for (const auto& [g, val] : v.entries) {
            (void)val;
            if (!bids.count(g))
                throw Fault("constant schedule misses group " + std::to_string(g) + " of agent " +
                            v.id);
        }
        std::map<GroupRef, double> own;
        for (const auto& [g, b] : bids)
            if (v.entry(g)) own[g] = b;
        return constant_schedule(v.id, own);
    };
}

StrategyProfile uniform_profile(const MarketGraph& graph, const StrategyCtor& ctor) {
    StrategyProfile p;
    for (const auto& a : graph.agents) p.ctors[a] = ctor;
    return p;
}

StrategyProfile truthful_profile(const MarketGraph& graph) {
    return uniform_profile(graph, truthful_ctor());
}

StrategyProfile refusal_profile(const MarketGraph& graph) {
    if (!graph.has_side_labels()) throw Fault("refusal profile requires side labels");
    StrategyProfile p;
    for (const auto& a : graph.agents) {
        // Bidders bid 0; askers ask 4, which is an engine-space bid of -4.
        double bid = graph.side_of(a) == Side::Asker ? -4.0 : 0.0;
        p.ctors[a] = constant_ctor(bid);
    }
    return p;
}

StrategyProfile pairwise_truthful(const StrategyProfile& base, const MarketGraph& graph,
                                  const AgentId& i, const AgentId& j) {
    bool feasible = false;
    for (const auto& members : graph.groups)
        if (members.size() == 2 &&
            ((members[0] == i && members[1] == j) || (members[0] == j && members[1] == i)))
            feasible = true;
    if (!feasible) throw Fault("pairwise_truthful: {" + i + "," + j + "} is not a feasible pair");
    if (graph.has_side_labels() && graph.side_of(i) == graph.side_of(j))
        throw Fault("pairwise_truthful: pair must span both market sides");
    return base.with(i, truthful_ctor()).with(j, truthful_ctor());
}

namespace {

/// Reference value a relative bid scales: the signed value, or the
/// distribution mean for not-yet-inspected entries (the mean is the agent's
/// own type, so privacy holds).
double reference_value(const RealizedValuation& val) {
    if (val.is_inspectable()) return val.spec.inspectable().dist.mean();
    return val.signed_value();
}

}  // namespace

StrategyCtor linear_ctor(std::map<GroupRef, GridPoint> coeffs) {
    return [coeffs = std::move(coeffs)](const AgentView& view) {
        std::map<GroupRef, double> bids;
        for (const auto& [g, pt] : coeffs) {
            const RealizedValuation* val = view.entry(g);
            if (!val)
                throw Fault("linear schedule references non-incident group " + std::to_string(g));
            bids[g] = pt.scale * reference_value(*val) + pt.offset;
        }
        return constant_schedule(view.id, bids);
    };
}

std::string linear_ctor_id(const std::map<GroupRef, GridPoint>& coeffs) {
    nlohmann::ordered_json body = nlohmann::ordered_json::object();
    for (const auto& [g, pt] : coeffs)
        body[std::to_string(g)] = nlohmann::ordered_json::array({pt.scale, pt.offset});
    return "linear:" + body.dump();
}

StrategyCtor resolve_ctor(const std::string& id) {
    if (id == "truthful") return truthful_ctor();
    if (id == "halfValue") return half_value_ctor();
    if (id == "zeroThenInspect") return zero_then_inspect_ctor();
    if (id.rfind("constant:", 0) == 0) {
        auto body = nlohmann::json::parse(id.substr(9));
        if (body.is_number()) return constant_ctor(body.get<double>());
        std::map<GroupRef, double> bids;
        for (auto it = body.begin(); it != body.end(); ++it)
            bids[std::stoi(it.key())] = it.value().get<double>();
        return constant_map_ctor(std::move(bids));
    }
    if (id.rfind("linear:", 0) == 0) {
        auto body = nlohmann::json::parse(id.substr(7));
        std::map<GroupRef, GridPoint> coeffs;
        for (auto it = body.begin(); it != body.end(); ++it)
            coeffs[std::stoi(it.key())] = {it.value().at(0).get<double>(),
                                           it.value().at(1).get<double>()};
        return linear_ctor(std::move(coeffs));
    }
    throw Fault("unknown strategy id: " + id);
}

StrategyProfile resolve_profile(const std::string& id, const MarketGraph& graph) {
    if (id == "refusal") return refusal_profile(graph);
    return uniform_profile(graph, resolve_ctor(id));
}

std::vector<GridPoint> default_grid() {
    return {
        {0.0, -2.0}, {0.0, -1.0}, {0.0, -0.5}, {0.0, 0.0}, {0.25, 0.0},
        {0.5, 0.0},  {1.0, 0.0},  {1.5, 0.0},  {1.0, 2.0},
    };
}

std::vector<BidSchedule> grid_deviations(const AgentView& view, const std::vector<GridPoint>& grid,
                                         std::size_t cap, std::uint64_t seed) {
    std::vector<BidSchedule> out;
    if (view.entries.empty() || grid.empty()) return out;
    const std::size_t m = view.entries.size();
    const std::size_t g = grid.size();

    double total = std::pow(static_cast<double>(g), static_cast<double>(m));
    auto bid_at = [&](std::size_t entry, std::size_t point) {
        const auto& [gref, val] = view.entries[entry];
        (void)gref;
        return grid[point].scale * reference_value(val) + grid[point].offset;
    };
    auto schedule_for = [&](const std::vector<std::size_t>& pick) {
        std::map<GroupRef, double> bids;
        for (std::size_t e = 0; e < m; ++e) bids[view.entries[e].first] = bid_at(e, pick[e]);
        return constant_schedule(view.id, bids);
    };

    if (total <= static_cast<double>(cap)) {
        std::vector<std::size_t> pick(m, 0);
        for (;;) {
            out.push_back(schedule_for(pick));
            std::size_t e = 0;
            while (e < m && ++pick[e] == g) pick[e++] = 0;
            if (e == m) break;
        }
    } else {
        Rng rng(derive_seed(seed, 0x677269640aULL));
        for (std::size_t k = 0; k < cap; ++k) {
            std::vector<std::size_t> pick(m);
            for (auto& p : pick) p = static_cast<std::size_t>(rng.below(g));
            out.push_back(schedule_for(pick));
        }
    }
    return out;
}

AgentView make_agent_view(const MarketGraph& graph, const TypeProfile& types,
                          const AgentId& agent) {
    AgentView view;
    view.id = agent;
    view.side = graph.side_of(agent);
    for (GroupRef g : graph.incident_groups(agent)) view.entries.emplace_back(g, types.at(agent, g));
    return view;
}

}  // namespace mm
