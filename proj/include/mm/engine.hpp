#pragma once

#include <map>
#include <set>
#include <vector>

#include "mm/market.hpp"
#include "mm/strategy.hpp"

namespace mm {

struct MatchRecord {
    GroupRef group = -1;
    double clearing_price = 0.0;
    double clock_time = 0.0;
};

/// Complete record of one mechanism run.
struct Transcript {
    std::vector<MatchRecord> matches;        // in fire order, price non-increasing
    std::map<AgentId, double> payments;      // net of rebates
    std::map<AgentId, double> group_price;   // total net payment on own matched group
    std::set<Incidence> inspected;           // I
    std::set<Incidence> matched;             // A
    std::map<AgentId, double> inspection_costs;
    std::map<AgentId, double> utilities;
    double welfare = 0.0;
    std::uint64_t seed_used = 0;
    double p_max_used = 0.0;

    /// Group the agent matched on, or -1.
    GroupRef matched_group(const AgentId& a) const {
        for (const auto& inc : matched)
            if (inc.agent == a) return inc.group;
        return -1;
    }
    bool agent_matched(const AgentId& a) const { return matched_group(a) != -1; }
};

/// Per-member settlement of a matched group. Bids are engine-space (asks
/// arrive negated). PayYourBid: everyone pays their bid. QuarterRebate
/// (pairs only): both sides get back a quarter of the bid sum, i.e. of the
/// bid-ask spread.
struct Settlement {
    std::map<AgentId, double> payments;  // net of rebate
    std::map<AgentId, double> rebates;
};
Settlement settle_edge(const Group& group, const std::map<AgentId, double>& bids_at_match,
                       PaymentRule rule);

/// Utilities from a finished transcript: matched signed value minus net
/// payment minus all inspection costs incurred (also when unmatched).
std::map<AgentId, double> compute_utilities(const Transcript& t, const MarketGraph& graph,
                                            const TypeProfile& types);

struct RunOptions {
    std::optional<double> p_max;
};

/// One Marshallian Match run: descending price sweep over scheduled bid
/// breakpoints, reactive inspections, and crossing events. Deterministic
/// given (graph, types, strategies, rule, seed); the seed feeds tie-breaking
/// only. Agents observe nothing but their own match.
Transcript run_match(const MarketGraph& graph, const TypeProfile& types,
                     const StrategyProfile& strategies, PaymentRule rule, std::uint64_t seed,
                     const RunOptions& options = {});

Transcript run_scenario(const Scenario& scenario, const StrategyProfile& strategies,
                        std::uint64_t seed);

}  // namespace mm
