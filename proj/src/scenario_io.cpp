#include "mm/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mm {

namespace {

Json incidence_to_json(const Incidence& inc) {
    return Json::array({inc.agent, inc.group});
}

Json entry_to_json(const Incidence& inc, const RealizedValuation& val) {
    Json j;
    j["agent"] = inc.agent;
    j["group"] = inc.group;
    if (auto* v = std::get_if<ValueKind>(&val.spec.kind)) {
        j["kind"] = "value";
        j["amount"] = v->value;
    } else if (auto* c = std::get_if<CostKind>(&val.spec.kind)) {
        j["kind"] = "cost";
        j["amount"] = c->cost;
    } else {
        const auto& ins = val.spec.inspectable();
        j["kind"] = "inspectable";
        j["inspectCost"] = ins.inspect_cost;
        j["dist"] = distribution_to_json(ins.dist);
        j["drawn"] = val.drawn;
    }
    return j;
}

std::pair<Incidence, RealizedValuation> entry_from_json(const Json& j) {
    Incidence inc{j.at("agent").get<AgentId>(), j.at("group").get<GroupRef>()};
    RealizedValuation val;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "value") {
        val.spec.kind = ValueKind{j.at("amount").get<double>()};
    } else if (kind == "cost") {
        val.spec.kind = CostKind{j.at("amount").get<double>()};
    } else if (kind == "inspectable") {
        val.spec.kind = InspectableKind{j.at("inspectCost").get<double>(),
                                        distribution_from_json(j.at("dist"))};
        val.drawn = j.value("drawn", 0.0);
    } else {
        throw Fault("unknown valuation kind: " + kind);
    }
    return {inc, val};
}

Json profile_entries_to_json(const TypeProfile& p) {
    Json arr = Json::array();
    for (const auto& [inc, val] : p.entries) arr.push_back(entry_to_json(inc, val));
    return arr;
}

TypeProfile profile_entries_from_json(const Json& arr) {
    TypeProfile p;
    for (const auto& j : arr) {
        auto [inc, val] = entry_from_json(j);
        p.entries[inc] = val;
    }
    return p;
}

EntrySpec entry_spec_from_json(const Json& j) {
    EntrySpec spec;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "value")
        spec.kind = EntrySpec::Kind::Value;
    else if (kind == "cost")
        spec.kind = EntrySpec::Kind::Cost;
    else if (kind == "inspectable")
        spec.kind = EntrySpec::Kind::Inspectable;
    else
        throw Fault("unknown entry kind: " + kind);
    spec.dist = distribution_from_json(j.at("dist"));
    spec.inspect_cost = j.value("inspectCost", 0.0);
    return spec;
}

Json entry_spec_to_json(const Incidence& inc, const EntrySpec& spec) {
    Json j;
    j["agent"] = inc.agent;
    j["group"] = inc.group;
    switch (spec.kind) {
        case EntrySpec::Kind::Value:
            j["kind"] = "value";
            break;
        case EntrySpec::Kind::Cost:
            j["kind"] = "cost";
            break;
        case EntrySpec::Kind::Inspectable:
            j["kind"] = "inspectable";
            j["inspectCost"] = spec.inspect_cost;
            break;
    }
    j["dist"] = distribution_to_json(spec.dist);
    return j;
}

}  // namespace

Json distribution_to_json(const Distribution& d) {
    Json j;
    if (auto* p = d.as_point()) {
        j["kind"] = "pointMass";
        j["value"] = p->value;
    } else if (auto* u = d.as_uniform()) {
        j["kind"] = "uniform";
        j["lo"] = u->lo;
        j["hi"] = u->hi;
    } else {
        j["kind"] = "finiteSupport";
        Json atoms = Json::array();
        for (const auto& [v, prob] : d.as_finite()->atoms) atoms.push_back(Json::array({v, prob}));
        j["atoms"] = atoms;
    }
    return j;
}

Distribution distribution_from_json(const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "pointMass") return Distribution::point(j.at("value").get<double>());
    if (kind == "uniform")
        return Distribution::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (kind == "finiteSupport") {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return Distribution::finite(std::move(atoms));
    }
    throw Fault("unknown distribution kind: " + kind);
}

Scenario scenario_from_json(const Json& j) {
    Scenario s;
    const Json& jg = j.at("graph");
    s.graph.agents = jg.at("agents").get<std::vector<AgentId>>();
    for (const auto& g : jg.at("groups")) s.graph.groups.push_back(g.get<Group>());
    s.graph.max_group_size = jg.value("maxGroupSize", 2);
    if (jg.contains("sideLabels") && !jg.at("sideLabels").is_null()) {
        for (auto it = jg.at("sideLabels").begin(); it != jg.at("sideLabels").end(); ++it) {
            std::string side = it.value().get<std::string>();
            if (side != "Bidder" && side != "Asker") throw Fault("side label must be Bidder|Asker");
            s.graph.side_labels[it.key()] = side == "Bidder" ? Side::Bidder : Side::Asker;
        }
    }

    const Json& jp = j.at("prior");
    std::string kind = jp.at("kind").get<std::string>();
    if (kind == "degenerate") {
        s.prior = DegeneratePrior{profile_entries_from_json(jp.at("entries"))};
    } else if (kind == "independentEntries") {
        IndependentEntriesPrior prior;
        for (const auto& je : jp.at("entries")) {
            Incidence inc{je.at("agent").get<AgentId>(), je.at("group").get<GroupRef>()};
            prior.entries[inc] = entry_spec_from_json(je);
        }
        s.prior = std::move(prior);
    } else if (kind == "explicitJoint") {
        ExplicitJointPrior prior;
        for (const auto& jo : jp.at("outcomes"))
            prior.outcomes.emplace_back(profile_entries_from_json(jo.at("entries")),
                                        jo.at("probability").get<double>());
        s.prior = std::move(prior);
    } else {
        throw Fault("unknown prior kind: " + kind);
    }

    std::string rule = j.at("paymentRule").get<std::string>();
    if (rule == "payYourBid")
        s.payment_rule = PaymentRule::PayYourBid;
    else if (rule == "quarterRebate")
        s.payment_rule = PaymentRule::QuarterRebate;
    else
        throw Fault("unknown payment rule: " + rule);

    if (j.contains("clock") && !j.at("clock").is_null()) {
        const Json& jc = j.at("clock");
        if (jc.contains("pMax") && !jc.at("pMax").is_null())
            s.p_max = jc.at("pMax").get<double>();
    }
    s.default_seed = j.value("defaultSeed", std::uint64_t{0});
    return s;
}

Json scenario_to_json(const Scenario& s) {
    Json j;
    Json jg;
    jg["agents"] = s.graph.agents;
    jg["groups"] = s.graph.groups;
    jg["maxGroupSize"] = s.graph.max_group_size;
    if (s.graph.has_side_labels()) {
        Json labels;
        for (const auto& [a, side] : s.graph.side_labels)
            labels[a] = side == Side::Bidder ? "Bidder" : "Asker";
        jg["sideLabels"] = labels;
    }
    j["graph"] = jg;

    Json jp;
    if (auto* deg = std::get_if<DegeneratePrior>(&s.prior)) {
        jp["kind"] = "degenerate";
        jp["entries"] = profile_entries_to_json(deg->profile);
    } else if (auto* ind = std::get_if<IndependentEntriesPrior>(&s.prior)) {
        jp["kind"] = "independentEntries";
        Json arr = Json::array();
        for (const auto& [inc, spec] : ind->entries) arr.push_back(entry_spec_to_json(inc, spec));
        jp["entries"] = arr;
    } else {
        const auto& joint = std::get<ExplicitJointPrior>(s.prior);
        jp["kind"] = "explicitJoint";
        Json arr = Json::array();
        for (const auto& [profile, prob] : joint.outcomes) {
            Json jo;
            jo["probability"] = prob;
            jo["entries"] = profile_entries_to_json(profile);
            arr.push_back(jo);
        }
        jp["outcomes"] = arr;
    }
    j["prior"] = jp;

    j["paymentRule"] = s.payment_rule == PaymentRule::PayYourBid ? "payYourBid" : "quarterRebate";
    Json jc;
    if (s.p_max) jc["pMax"] = *s.p_max;
    j["clock"] = jc;
    j["defaultSeed"] = s.default_seed;
    return j;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Fault("cannot open scenario file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Fault("malformed scenario JSON in " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Fault("cannot write scenario file: " + path);
    out << scenario_to_json(s).dump(2) << "\n";
}

Json transcript_to_json(const Transcript& t, const MarketGraph& graph) {
    Json j;
    j["seedUsed"] = t.seed_used;
    j["pMax"] = t.p_max_used;
    j["welfare"] = t.welfare;
    Json matches = Json::array();
    for (const auto& m : t.matches) {
        Json jm;
        jm["group"] = m.group;
        jm["members"] = graph.groups.at(m.group);
        jm["clearingPrice"] = m.clearing_price;
        jm["clockTime"] = m.clock_time;
        matches.push_back(jm);
    }
    j["matches"] = matches;
    auto map_json = [](const std::map<AgentId, double>& m) {
        Json out;
        for (const auto& [a, v] : m) out[a] = v;
        return out;
    };
    j["payments"] = map_json(t.payments);
    j["groupPrice"] = map_json(t.group_price);
    Json inspected = Json::array();
    for (const auto& inc : t.inspected) inspected.push_back(incidence_to_json(inc));
    j["inspected"] = inspected;
    Json matched = Json::array();
    for (const auto& inc : t.matched) matched.push_back(incidence_to_json(inc));
    j["matched"] = matched;
    j["inspectionCosts"] = map_json(t.inspection_costs);
    j["utilities"] = map_json(t.utilities);
    return j;
}

Json bid_schedule_to_json(const BidSchedule& s) {
    Json j;
    j["owner"] = s.owner;
    Json per_group;
    for (const auto& [g, bps] : s.per_group) {
        Json arr = Json::array();
        for (const auto& bp : bps) {
            Json jb;
            if (std::isinf(bp.price))
                jb["price"] = nullptr;  // from the sweep start
            else
                jb["price"] = bp.price;
            jb["bid"] = bp.bid;
            arr.push_back(jb);
        }
        per_group[std::to_string(g)] = arr;
    }
    j["perGroup"] = per_group;
    Json reactive = Json::array();
    for (const auto& trig : s.reactive) {
        Json jt;
        jt["group"] = trig.group;
        jt["triggerPrice"] = trig.trigger_price;
        switch (trig.mode) {
            case InspectTrigger::PostBid::CoveredCallScale:
                jt["mode"] = "coveredCallScale";
                break;
            case InspectTrigger::PostBid::DrawnScale:
                jt["mode"] = "drawnScale";
                break;
            case InspectTrigger::PostBid::Constant:
                jt["mode"] = "constant";
                break;
        }
        jt["scale"] = trig.scale;
        jt["offset"] = trig.offset;
        jt["strike"] = trig.strike;
        reactive.push_back(jt);
    }
    j["reactive"] = reactive;
    return j;
}

Json audit_report_to_json(const AuditReport& r, const Scenario& scenario,
                          const StrategyProfile& profile) {
    Json j;
    j["auditName"] = r.audit_name;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["bound"] = r.bound;
    j["family"] = r.family;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    Json stats = Json::array();
    for (const auto& s : r.statistics) {
        Json js;
        js["name"] = s.name;
        js["value"] = s.value;
        if (s.stderr_mean) js["stderr"] = *s.stderr_mean;
        stats.push_back(js);
    }
    j["statistics"] = stats;
    if (r.witness) {
        const auto& w = *r.witness;
        Json jw;
        jw["realizationSeed"] = w.realization_seed;
        if (w.outcome_index)
            jw["outcomeIndex"] = *w.outcome_index;
        else
            jw["outcomeIndex"] = nullptr;
        jw["runSeed"] = w.run_seed;
        jw["agent"] = w.agent;
        jw["partner"] = w.partner;
        jw["group"] = w.group;
        jw["deviation"] = w.deviation_desc;
        Json ids;
        for (const auto& [a, id] : w.deviation_ids) ids[a] = id;
        jw["deviationIds"] = ids;
        Json schedules;
        for (const auto& [a, sched] : w.overrides) schedules[a] = bid_schedule_to_json(sched);
        jw["schedules"] = schedules;
        jw["lhs"] = w.lhs;
        jw["rhs"] = w.rhs;
        jw["violation"] = w.violation;
        ReplayResult replay = replay_witness(scenario, profile, r);
        jw["replayViolation"] = replay.violation;
        jw["transcript"] = transcript_to_json(replay.transcript, scenario.graph);
        j["witness"] = jw;
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

std::string audit_report_csv_header() { return "auditName,verdict,statistic,bound,samples,seed"; }

std::string audit_report_csv_row(const AuditReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.audit_name << "," << (r.pass ? "pass" : "fail") << ",";
    if (!r.statistics.empty()) os << r.statistics.front().value;
    os << "," << r.bound << "," << r.samples << "," << r.seed;
    return os.str();
}

StrategyProfile profile_from_spec(const std::string& spec, const MarketGraph& graph) {
    bool looks_like_file = spec.size() > 5 && spec.substr(spec.size() - 5) == ".json" &&
                           spec.rfind("constant:", 0) != 0 && spec.rfind("linear:", 0) != 0;
    if (!looks_like_file) return resolve_profile(spec, graph);
    std::ifstream in(spec);
    if (!in) throw Fault("cannot open profile file: " + spec);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Fault("malformed profile JSON in " + spec + ": " + e.what());
    }
    StrategyProfile profile;
    if (j.contains("*")) profile = resolve_profile(j.at("*").get<std::string>(), graph);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "*") continue;
        if (graph.agent_index(it.key()) < 0) throw Fault("profile names unknown agent " + it.key());
        profile.ctors[it.key()] = resolve_ctor(it.value().get<std::string>());
    }
    for (const auto& a : graph.agents)
        if (!profile.ctors.count(a)) throw Fault("profile missing strategy for agent " + a);
    return profile;
}

}  // namespace mm
