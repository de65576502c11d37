#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mm/market.hpp"

namespace mm {

/// Piecewise-constant bid in descending price: the pair (price, bid) means
/// "from this price downward, bid this much, until the next breakpoint".
/// Schedules are right-continuous in the direction of play. The first
/// breakpoint of a well-formed schedule sits at +infinity so the bid is
/// defined from the sweep start.
struct Breakpoint {
    double price = std::numeric_limits<double>::infinity();
    double bid = 0.0;
};

/// Reactive rule: when the clock reaches trigger_price and the group is
/// still live, inspect (pay r, observe the drawn value) and replace the bid.
struct InspectTrigger {
    enum class PostBid {
        CoveredCallScale,  // bid = scale * min(strike, drawn) + offset
        DrawnScale,        // bid = scale * drawn + offset
        Constant,          // bid = offset
    };
    GroupRef group = -1;
    double trigger_price = 0.0;
    PostBid mode = PostBid::CoveredCallScale;
    double scale = 0.5;
    double offset = 0.0;
    double strike = 0.0;  // sigma for CoveredCallScale, precomputed

    double bid_after(double drawn) const {
        switch (mode) {
            case PostBid::CoveredCallScale:
                return scale * std::min(strike, drawn) + offset;
            case PostBid::DrawnScale:
                return scale * drawn + offset;
            case PostBid::Constant:
                return offset;
        }
        return offset;
    }
};

struct BidSchedule {
    AgentId owner;
    // Breakpoints per incident group, strictly decreasing in price.
    std::map<GroupRef, std::vector<Breakpoint>> per_group;
    std::vector<InspectTrigger> reactive;
};

/// What a strategy constructor is allowed to see: the owner's identity, side
/// and own valuation entries. Private-information discipline is structural —
/// nothing else is passed in.
struct AgentView {
    AgentId id;
    std::optional<Side> side;
    std::vector<std::pair<GroupRef, RealizedValuation>> entries;

    const RealizedValuation* entry(GroupRef g) const {
        for (const auto& [gref, val] : entries)
            if (gref == g) return &val;
        return nullptr;
    }
};

using StrategyCtor = std::function<BidSchedule(const AgentView&)>;

struct StrategyProfile {
    std::map<AgentId, StrategyCtor> ctors;
    std::uint64_t shared_seed = 0;

    StrategyProfile with(const AgentId& agent, StrategyCtor ctor) const {
        StrategyProfile out = *this;
        out.ctors[agent] = std::move(ctor);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Named constructors

/// Constant bid at the agent's own signed value (bidders bid v, askers ask
/// c). Faults on Inspectable entries: truth is undefined before inspection.
BidSchedule truthful(const AgentView& view);

/// Constant bid at half the (nonnegative) value on every incident group.
BidSchedule half_value(const AgentView& view);

/// Bid zero, then at price sigma/2 inspect and re-bid min(sigma, drawn)/2.
/// Requires every incident entry to be Inspectable with sigma >= 0.
BidSchedule zero_then_inspect(const AgentView& view);

/// Single-breakpoint schedule from explicit engine-space bids per group.
BidSchedule constant_schedule(const AgentId& owner, const std::map<GroupRef, double>& bids);

StrategyCtor truthful_ctor();
StrategyCtor half_value_ctor();
StrategyCtor zero_then_inspect_ctor();
/// Constant engine-space bid per incident group, one value for all groups.
StrategyCtor constant_ctor(double bid);
StrategyCtor constant_map_ctor(std::map<GroupRef, double> bids);

/// One grid bid as a function of the agent's signed value v: scale*v+offset.
struct GridPoint {
    double scale = 0.0;
    double offset = 0.0;
};

/// Value-relative constant bids: on group g bid scale*v + offset, where v is
/// the agent's own signed value (distribution mean before inspection, which
/// is still the agent's private type). Type-measurable, so usable as a
/// deviation across realizations.
StrategyCtor linear_ctor(std::map<GroupRef, GridPoint> coeffs);
std::string linear_ctor_id(const std::map<GroupRef, GridPoint>& coeffs);

/// Everyone refuses: bidders bid 0, askers ask 4 on every edge. Requires
/// side labels.
StrategyProfile refusal_profile(const MarketGraph& graph);

/// All agents truthful.
StrategyProfile truthful_profile(const MarketGraph& graph);
StrategyProfile uniform_profile(const MarketGraph& graph, const StrategyCtor& ctor);

/// base with agents i and j swapped to truthful schedules. Faults unless
/// {i, j} is a feasible pair of the graph.
StrategyProfile pairwise_truthful(const StrategyProfile& base, const MarketGraph& graph,
                                  const AgentId& i, const AgentId& j);

// ---------------------------------------------------------------------------
// Registry & deviation grids

/// Resolve a named strategy id ("truthful", "halfValue", "zeroThenInspect",
/// "refusal", "constant:{...}", "linear:{...}") into a profile for the whole
/// graph.
StrategyProfile resolve_profile(const std::string& id, const MarketGraph& graph);
/// Resolve one agent's ctor by id ("constant:{\"0\": 3.5}" maps group->bid).
StrategyCtor resolve_ctor(const std::string& id);

/// Default audit grid: {-2, -1, -0.5, 0, 0.25v, 0.5v, v, 1.5v, v+2}.
std::vector<GridPoint> default_grid();

/// All constant-schedule deviations for one agent: the grid is applied per
/// incident group and combinations are capped (seeded subsample past the
/// cap). Each deviation is a full BidSchedule for the agent.
std::vector<BidSchedule> grid_deviations(const AgentView& view, const std::vector<GridPoint>& grid,
                                         std::size_t cap, std::uint64_t seed);

AgentView make_agent_view(const MarketGraph& graph, const TypeProfile& types, const AgentId& agent);

}  // namespace mm
