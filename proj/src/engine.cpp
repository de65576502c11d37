#include "mm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mm/rng.hpp"

namespace mm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Event {
    double price = 0.0;  // effective price, clamped to the sweep start
    int agent = -1;
    GroupRef group = -1;
    int kind = 0;  // 0 = breakpoint, 1 = trigger
    double bid = 0.0;
    int trigger_index = -1;
};

/// Largest bid magnitude a schedule can ever place, used for the default
/// sweep start.
double schedule_bid_bound(const BidSchedule& sched, const TypeProfile& types) {
    double bound = 0.0;
    for (const auto& [g, bps] : sched.per_group)
        for (const auto& bp : bps) bound = std::max(bound, std::abs(bp.bid));
    for (const auto& trig : sched.reactive) {
        const auto& entry = types.at(sched.owner, trig.group);
        double reach = std::abs(trig.offset);
        switch (trig.mode) {
            case InspectTrigger::PostBid::CoveredCallScale:
                reach += std::abs(trig.scale) * std::abs(trig.strike);
                break;
            case InspectTrigger::PostBid::DrawnScale:
                if (entry.is_inspectable())
                    reach += std::abs(trig.scale) *
                             std::abs(entry.spec.inspectable().dist.max_support());
                else
                    reach += std::abs(trig.scale) * std::abs(entry.signed_value());
                break;
            case InspectTrigger::PostBid::Constant:
                break;
        }
        bound = std::max(bound, reach);
    }
    return bound;
}

}  // namespace

Settlement settle_edge(const Group& group, const std::map<AgentId, double>& bids_at_match,
                       PaymentRule rule) {
    Settlement out;
    double sum = 0.0;
    for (const auto& a : group) {
        auto it = bids_at_match.find(a);
        if (it == bids_at_match.end()) throw Fault("settle_edge: missing bid for agent " + a);
        sum += it->second;
    }
    if (rule == PaymentRule::QuarterRebate && group.size() != 2)
        throw Fault("settle_edge: quarter rebate is defined for pairs only");
    double rebate = rule == PaymentRule::QuarterRebate ? sum / 4.0 : 0.0;
    for (const auto& a : group) {
        out.rebates[a] = rebate;
        out.payments[a] = bids_at_match.at(a) - rebate;
    }
    return out;
}

std::map<AgentId, double> compute_utilities(const Transcript& t, const MarketGraph& graph,
                                            const TypeProfile& types) {
    std::map<AgentId, double> out;
    for (const auto& a : graph.agents) {
        double value = 0.0;
        GroupRef g = t.matched_group(a);
        if (g >= 0) value = types.at(a, g).signed_value();
        double pay = t.payments.count(a) ? t.payments.at(a) : 0.0;
        double costs = t.inspection_costs.count(a) ? t.inspection_costs.at(a) : 0.0;
        out[a] = value - pay - costs;
    }
    return out;
}

Transcript run_match(const MarketGraph& graph, const TypeProfile& types,
                     const StrategyProfile& strategies, PaymentRule rule, std::uint64_t seed,
                     const RunOptions& options) {
    const int n = static_cast<int>(graph.agents.size());
    const int num_groups = static_cast<int>(graph.groups.size());

    // Build every agent's schedule from its private view.
    std::vector<BidSchedule> schedules(n);
    for (int a = 0; a < n; ++a) {
        const AgentId& id = graph.agents[a];
        auto it = strategies.ctors.find(id);
        if (it == strategies.ctors.end()) throw Fault("no strategy for agent " + id);
        schedules[a] = it->second(make_agent_view(graph, types, id));
        for (GroupRef g : graph.incident_groups(id))
            if (!schedules[a].per_group.count(g))
                throw Fault("bid schedule of agent " + id + " is undefined on group " +
                            std::to_string(g));
    }

    double p_max;
    if (options.p_max) {
        p_max = *options.p_max;
        if (p_max <= 0.0) throw Fault("run_match: pMax must be positive");
    } else {
        p_max = 1.0;
        for (int a = 0; a < n; ++a) p_max += schedule_bid_bound(schedules[a], types);
    }
    PriceSchedule clock(p_max);

    // Member indices per group and incidence lists.
    std::vector<std::vector<int>> members(num_groups);
    std::vector<std::vector<GroupRef>> incident(n);
    for (GroupRef g = 0; g < num_groups; ++g) {
        for (const auto& id : graph.groups[g]) {
            int a = graph.agent_index(id);
            if (a < 0) throw Fault("group member not in agents: " + id);
            members[g].push_back(a);
            incident[a].push_back(g);
        }
    }

    // Current bids; breakpoints at or above the sweep start apply
    // immediately, the rest become events.
    std::vector<std::map<GroupRef, double>> bid(n);
    std::vector<Event> events;
    for (int a = 0; a < n; ++a) {
        for (const auto& [g, bps] : schedules[a].per_group) {
            if (bps.empty())
                throw Fault("empty bid schedule for agent " + graph.agents[a] + " on group " +
                            std::to_string(g));
            for (std::size_t k = 0; k + 1 < bps.size(); ++k)
                if (!(bps[k].price > bps[k + 1].price))
                    throw Fault("bid schedule breakpoints must strictly decrease in price");
            if (bps.front().price < p_max)
                throw Fault("bid schedule of agent " + graph.agents[a] +
                            " is undefined at the sweep start");
            std::size_t k = 0;
            while (k + 1 < bps.size() && bps[k + 1].price >= p_max) ++k;
            bid[a][g] = bps[k].bid;
            for (std::size_t rest = k + 1; rest < bps.size(); ++rest)
                events.push_back({bps[rest].price, a, g, 0, bps[rest].bid, -1});
        }
        for (std::size_t t = 0; t < schedules[a].reactive.size(); ++t) {
            const auto& trig = schedules[a].reactive[t];
            if (trig.trigger_price < 0.0) throw Fault("trigger price must be nonnegative");
            events.push_back({std::min(trig.trigger_price, p_max), a, trig.group, 1, 0.0,
                              static_cast<int>(t)});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
        if (x.price != y.price) return x.price > y.price;
        if (x.agent != y.agent) return x.agent < y.agent;
        if (x.group != y.group) return x.group < y.group;
        return x.kind < y.kind;
    });

    Transcript out;
    out.seed_used = seed;
    out.p_max_used = p_max;
    for (const auto& id : graph.agents) {
        out.payments[id] = 0.0;
        out.group_price[id] = 0.0;
        out.inspection_costs[id] = 0.0;
    }

    std::vector<bool> agent_active(n, true);
    std::vector<bool> group_active(num_groups, true);

    auto group_sum = [&](GroupRef g) {
        double s = 0.0;
        for (int a : members[g]) s += bid[a].at(g);
        return s;
    };

    auto inspect = [&](int a, GroupRef g) {
        const AgentId& id = graph.agents[a];
        Incidence inc{id, g};
        if (out.inspected.count(inc)) return;
        const auto& entry = types.at(id, g);
        if (!entry.is_inspectable()) return;
        out.inspected.insert(inc);
        out.inspection_costs[id] += entry.spec.inspectable().inspect_cost;
    };

    auto fire_match = [&](GroupRef g, double price) {
        // Matching forces inspection of any still-hidden valuation.
        std::map<AgentId, double> bids_now;
        for (int a : members[g]) {
            const AgentId& id = graph.agents[a];
            inspect(a, g);
            bids_now[id] = bid[a].at(g);
        }
        Settlement settle = settle_edge(graph.groups[g], bids_now, rule);
        double total = 0.0;
        for (const auto& [id, pay] : settle.payments) {
            out.payments[id] += pay;
            total += pay;
        }
        for (int a : members[g]) {
            const AgentId& id = graph.agents[a];
            out.group_price[id] = total;
            out.matched.insert({id, g});
            agent_active[a] = false;
            for (GroupRef h : incident[a]) group_active[h] = false;
        }
        out.matches.push_back({g, price, clock.time_at_price(price)});
    };

    auto fire_crossings = [&](double price) {
        for (;;) {
            GroupRef best = -1;
            std::uint64_t best_priority = 0;
            for (GroupRef g = 0; g < num_groups; ++g) {
                if (!group_active[g]) continue;
                if (group_sum(g) < price) continue;
                std::uint64_t pr = tie_priority(seed, g);
                if (best < 0 || pr < best_priority) {
                    best = g;
                    best_priority = pr;
                }
            }
            if (best < 0) return;
            fire_match(best, price);
        }
    };

    auto apply_event = [&](const Event& ev) {
        if (ev.kind == 0) {
            bid[ev.agent][ev.group] = ev.bid;
            return;
        }
        // Triggers are void once the owner or the group has left the market.
        if (!agent_active[ev.agent] || !group_active[ev.group]) return;
        const AgentId& id = graph.agents[ev.agent];
        if (out.inspected.count({id, ev.group})) return;
        const auto& entry = types.at(id, ev.group);
        if (!entry.is_inspectable()) return;
        inspect(ev.agent, ev.group);
        const auto& trig = schedules[ev.agent].reactive[ev.trigger_index];
        bid[ev.agent][ev.group] = trig.bid_after(entry.drawn);
    };

    // Price sweep: process bid updates and inspections in descending price
    // order; crossings fire at the current price, highest first.
    std::size_t idx = 0;
    while (idx < events.size() && events[idx].price >= p_max) apply_event(events[idx++]);
    fire_crossings(p_max);

    for (;;) {
        double q_event = idx < events.size() ? events[idx].price : kNegInf;
        double q_cross = kNegInf;
        for (GroupRef g = 0; g < num_groups; ++g) {
            if (!group_active[g]) continue;
            double s = group_sum(g);
            if (s >= 0.0) q_cross = std::max(q_cross, s);
        }
        if (q_event == kNegInf && q_cross == kNegInf) break;
        if (q_event >= q_cross) {
            double p = q_event;
            while (idx < events.size() && events[idx].price == p) apply_event(events[idx++]);
            fire_crossings(p);
        } else {
            fire_crossings(q_cross);
        }
    }

    out.utilities = compute_utilities(out, graph, types);
    double welfare = 0.0;
    for (const auto& id : graph.agents) welfare += out.utilities.at(id) + out.payments.at(id);
    out.welfare = welfare;
    return out;
}

Transcript run_scenario(const Scenario& scenario, const StrategyProfile& strategies,
                        std::uint64_t seed) {
    TypeProfile types = realize_types(scenario.prior, derive_seed(seed, 0x7479706573ULL));
    RunOptions opt;
    opt.p_max = scenario.p_max;
    return run_match(scenario.graph, types, strategies, scenario.payment_rule,
                     derive_seed(seed, 0x72756eULL), opt);
}

}  // namespace mm
