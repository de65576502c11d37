#include "mm/auditors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mm/pandora.hpp"
#include "mm/parallel.hpp"
#include "mm/rng.hpp"

namespace mm {

namespace {

constexpr std::uint64_t kTypesTag = 0x7479706573ULL;
constexpr std::uint64_t kRunTag = 0x72756eULL;
constexpr std::uint64_t kEnumTag = 0x656e756dULL;

/// One audited world: a realized profile plus its probability weight (for
/// enumerated priors) and the run seed shared by base and deviation runs.
struct Realization {
    TypeProfile types;
    double weight = 1.0;
    std::uint64_t realization_seed = 0;
    std::optional<std::size_t> outcome_index;
    std::uint64_t run_seed = 0;
};

std::vector<Realization> realizations_for(const Scenario& scenario, long samples,
                                          std::uint64_t seed) {
    std::vector<Realization> out;
    if (finite_support_size(scenario.prior, kEnumerationLimit)) {
        auto support = enumerate_support(scenario.prior, kEnumerationLimit);
        out.reserve(support.size());
        for (std::size_t i = 0; i < support.size(); ++i) {
            Realization r;
            r.types = std::move(support[i].first);
            r.weight = support[i].second;
            r.outcome_index = i;
            r.run_seed = derive_seed(seed, kEnumTag ^ (i + 1));
            out.push_back(std::move(r));
        }
        return out;
    }
    out.reserve(static_cast<std::size_t>(samples));
    for (long s = 0; s < samples; ++s) {
        Realization r;
        r.realization_seed = derive_seed(seed, static_cast<std::uint64_t>(s));
        r.types = realize_types(scenario.prior, derive_seed(r.realization_seed, kTypesTag));
        r.weight = 1.0 / static_cast<double>(samples);
        r.run_seed = derive_seed(r.realization_seed, kRunTag);
        out.push_back(std::move(r));
    }
    return out;
}

Transcript run_realized(const Scenario& scenario, const StrategyProfile& profile,
                        const Realization& r) {
    RunOptions opt;
    opt.p_max = scenario.p_max;
    return run_match(scenario.graph, r.types, profile, scenario.payment_rule, r.run_seed, opt);
}

StrategyCtor fixed_schedule_ctor(BidSchedule sched) {
    return [sched = std::move(sched)](const AgentView&) { return sched; };
}

struct Deviation {
    StrategyCtor ctor;
    std::string id;  // resolvable via resolve_ctor
};

const std::vector<GridPoint>& points_for_side(const DeviationFamily& family,
                                              std::optional<Side> side) {
    if (side == Side::Asker && !family.asker_points.empty()) return family.asker_points;
    return family.bidder_points;
}

std::vector<Deviation> unilateral_deviations(const DeviationFamily& family,
                                             const MarketGraph& graph, const AgentId& agent,
                                             std::uint64_t seed) {
    std::vector<Deviation> out;
    switch (family.kind) {
        case DeviationFamily::Kind::HalfValue:
            out.push_back({half_value_ctor(), "halfValue"});
            return out;
        case DeviationFamily::Kind::ZeroThenInspect:
            out.push_back({zero_then_inspect_ctor(), "zeroThenInspect"});
            return out;
        case DeviationFamily::Kind::PairwiseTruthful:
            out.push_back({truthful_ctor(), "truthful"});
            return out;
        case DeviationFamily::Kind::ConstantGrid:
            break;
    }
    const auto& points = points_for_side(family, graph.side_of(agent));
    std::vector<GroupRef> groups = graph.incident_groups(agent);
    if (groups.empty() || points.empty()) return out;
    const std::size_t m = groups.size();
    const std::size_t g = points.size();
    double total = std::pow(static_cast<double>(g), static_cast<double>(m));
    auto push_pick = [&](const std::vector<std::size_t>& pick) {
        std::map<GroupRef, GridPoint> coeffs;
        for (std::size_t e = 0; e < m; ++e) coeffs[groups[e]] = points[pick[e]];
        out.push_back({linear_ctor(coeffs), linear_ctor_id(coeffs)});
    };
    if (total <= static_cast<double>(family.cap_per_agent)) {
        std::vector<std::size_t> pick(m, 0);
        for (;;) {
            push_pick(pick);
            std::size_t e = 0;
            while (e < m && ++pick[e] == g) pick[e++] = 0;
            if (e == m) break;
        }
    } else {
        Rng rng(derive_seed(seed, 0x6772696464657600ULL));
        for (std::size_t k = 0; k < family.cap_per_agent; ++k) {
            std::vector<std::size_t> pick(m);
            for (auto& p : pick) p = static_cast<std::size_t>(rng.below(g));
            push_pick(pick);
        }
    }
    return out;
}

/// Feasible bidder-asker pairs (i, j) over size-2 groups, oriented so that
/// i is the bidder when side labels exist.
std::vector<std::tuple<AgentId, AgentId, GroupRef>> feasible_pairs(const MarketGraph& graph) {
    std::vector<std::tuple<AgentId, AgentId, GroupRef>> out;
    for (GroupRef g = 0; g < static_cast<int>(graph.groups.size()); ++g) {
        const Group& members = graph.groups[g];
        if (members.size() != 2) continue;
        AgentId i = members[0], j = members[1];
        if (graph.side_of(i) == Side::Asker && graph.side_of(j) == Side::Bidder) std::swap(i, j);
        out.emplace_back(i, j, g);
    }
    return out;
}

double utility_of(const Transcript& t, const AgentId& a) { return t.utilities.at(a); }

bool sampled_prior(const Scenario& scenario) {
    return !finite_support_size(scenario.prior, kEnumerationLimit).has_value();
}

void record_witness(AuditReport& report, const Scenario& scenario, const Realization& r,
                    const AgentId& agent, const AgentId& partner, GroupRef group,
                    const std::string& desc, std::map<AgentId, std::string> deviation_ids,
                    double lhs, double rhs) {
    AuditWitness w;
    w.realization_seed = r.realization_seed;
    w.outcome_index = r.outcome_index;
    w.run_seed = r.run_seed;
    w.agent = agent;
    w.partner = partner;
    w.group = group;
    w.deviation_desc = desc;
    w.deviation_ids = std::move(deviation_ids);
    for (const auto& [id, ctor_id] : w.deviation_ids)
        w.overrides[id] =
            resolve_ctor(ctor_id)(make_agent_view(scenario.graph, r.types, id));
    w.lhs = lhs;
    w.rhs = rhs;
    w.violation = rhs - lhs;
    report.witness = w;
}

}  // namespace

DeviationFamily DeviationFamily::pairwise_truthful() {
    DeviationFamily f;
    f.kind = Kind::PairwiseTruthful;
    return f;
}
DeviationFamily DeviationFamily::half_value() {
    DeviationFamily f;
    f.kind = Kind::HalfValue;
    return f;
}
DeviationFamily DeviationFamily::zero_then_inspect() {
    DeviationFamily f;
    f.kind = Kind::ZeroThenInspect;
    return f;
}
DeviationFamily DeviationFamily::constant_grid(std::vector<GridPoint> points) {
    DeviationFamily f;
    f.kind = Kind::ConstantGrid;
    f.bidder_points = std::move(points);
    return f;
}
DeviationFamily DeviationFamily::absolute_levels(const std::vector<double>& bids,
                                                 const std::vector<double>& asks) {
    DeviationFamily f;
    f.kind = Kind::ConstantGrid;
    for (double b : bids) f.bidder_points.push_back({0.0, b});
    for (double a : asks) f.asker_points.push_back({0.0, -a});  // asks negate into engine space
    return f;
}

std::string DeviationFamily::describe() const {
    switch (kind) {
        case Kind::HalfValue:
            return "halfValue";
        case Kind::ZeroThenInspect:
            return "zeroThenInspect";
        case Kind::PairwiseTruthful:
            return "pairwiseTruthful";
        case Kind::ConstantGrid: {
            std::ostringstream os;
            os << "constantGrid(" << bidder_points.size();
            if (!asker_points.empty()) os << "x" << asker_points.size();
            os << " points)";
            return os.str();
        }
    }
    return "?";
}

ExpectedValue expected_welfare(const Scenario& scenario, const StrategyProfile& profile,
                               long samples, std::uint64_t seed, int jobs) {
    ExpectedValue out;
    if (!sampled_prior(scenario)) {
        auto worlds = realizations_for(scenario, samples, seed);
        double mean = 0.0;
        for (const auto& r : worlds) mean += r.weight * run_realized(scenario, profile, r).welfare;
        out.mean = mean;
        out.samples = static_cast<long>(worlds.size());
        return out;
    }
    auto values = parallel_map<double>(samples, jobs, [&](long s) {
        std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(s));
        Realization r;
        r.types = realize_types(scenario.prior, derive_seed(rs, kTypesTag));
        r.run_seed = derive_seed(rs, kRunTag);
        return run_realized(scenario, profile, r).welfare;
    });
    RunningStat stat;
    for (double v : values) stat.add(v);
    out.mean = stat.mean();
    out.stderr_mean = stat.stderr_mean();
    out.samples = samples;
    return out;
}

AuditReport ex_post_audit(const Scenario& scenario, const StrategyProfile& profile, double k,
                          long samples, std::uint64_t seed) {
    if (k <= 0.0) throw Fault("ex_post_audit: stability parameter must be positive");
    AuditReport report;
    report.audit_name = "expost";
    report.bound = k;
    report.seed = seed;
    auto pairs = feasible_pairs(scenario.graph);
    auto worlds = realizations_for(scenario, samples, seed);
    report.samples = static_cast<long>(worlds.size());

    double worst_slack = std::numeric_limits<double>::infinity();
    for (const auto& r : worlds) {
        Transcript t = run_realized(scenario, profile, r);
        for (const auto& [i, j, g] : pairs) {
            double joint = utility_of(t, i) + utility_of(t, j);
            double s = surplus(r.types, scenario.graph, g);
            double slack = joint - s / k;
            if (slack < worst_slack) {
                worst_slack = slack;
                if (slack < -kExactSlack)
                    record_witness(report, scenario, r, i, j, g, "", {}, joint, s / k);
            }
        }
    }
    if (pairs.empty() || worlds.empty()) worst_slack = 0.0;  // vacuous pass
    report.pass = worst_slack >= -kExactSlack;
    if (report.pass) report.witness.reset();
    report.statistics.push_back({"worstJointMinusBound", worst_slack, std::nullopt});
    return report;
}

namespace {

/// Expected joint utility of (i, j) with optional deviation ctors swapped
/// in; shares realizations (and run seeds) with the caller for pairing.
double expected_pair_joint(const Scenario& scenario, const StrategyProfile& profile,
                           const std::vector<Realization>& worlds, const AgentId& i,
                           const AgentId& j) {
    double acc = 0.0;
    for (const auto& r : worlds) {
        Transcript t = run_realized(scenario, profile, r);
        acc += r.weight * (utility_of(t, i) + utility_of(t, j));
    }
    return acc;
}

}  // namespace

AuditReport ex_ante_audit(const Scenario& scenario, const StrategyProfile& profile, double k,
                          const DeviationFamily& family, long samples, std::uint64_t seed) {
    if (k <= 0.0) throw Fault("ex_ante_audit: stability parameter must be positive");
    AuditReport report;
    report.audit_name = "exante";
    report.bound = k;
    report.seed = seed;
    report.family = family.describe();

    auto pairs = feasible_pairs(scenario.graph);
    auto worlds = realizations_for(scenario, samples, seed);
    report.samples = static_cast<long>(worlds.size());
    const bool exact = !sampled_prior(scenario);

    struct PairDeviation {
        StrategyProfile profile;
        std::string desc;
        std::map<AgentId, std::string> ids;
    };

    double worst_gap = -std::numeric_limits<double>::infinity();
    for (const auto& [i, j, g] : pairs) {
        double base_joint = expected_pair_joint(scenario, profile, worlds, i, j);

        std::vector<PairDeviation> deviations;
        if (family.kind == DeviationFamily::Kind::PairwiseTruthful) {
            deviations.push_back({pairwise_truthful(profile, scenario.graph, i, j),
                                  "pairwiseTruthful",
                                  {{i, "truthful"}, {j, "truthful"}}});
        } else {
            auto di = unilateral_deviations(family, scenario.graph, i, derive_seed(seed, 0xdeb1));
            auto dj = unilateral_deviations(family, scenario.graph, j, derive_seed(seed, 0xdeb2));
            // Joint combinations, capped like a single agent's grid.
            auto add = [&](const Deviation& a, const Deviation& b) {
                deviations.push_back({profile.with(i, a.ctor).with(j, b.ctor),
                                      a.id + " + " + b.id,
                                      {{i, a.id}, {j, b.id}}});
            };
            std::size_t total = di.size() * dj.size();
            if (total <= family.cap_per_agent) {
                for (const auto& a : di)
                    for (const auto& b : dj) add(a, b);
            } else {
                Rng rng(derive_seed(seed, 0x6a6f696e74ULL));
                for (std::size_t n = 0; n < family.cap_per_agent; ++n)
                    add(di[rng.below(di.size())], dj[rng.below(dj.size())]);
            }
        }

        for (const auto& dev : deviations) {
            RunningStat diff;  // dev/k - base per world, for sampled stderr
            double dev_joint = 0.0;
            for (const auto& r : worlds) {
                Transcript t = run_realized(scenario, dev.profile, r);
                double dj_val = utility_of(t, i) + utility_of(t, j);
                dev_joint += r.weight * dj_val;
                if (!exact) {
                    Transcript tb = run_realized(scenario, profile, r);
                    diff.add(dj_val / k - (utility_of(tb, i) + utility_of(tb, j)));
                }
            }
            double gap = dev_joint / k - base_joint;
            double tol = exact ? kExactSlack : 3.0 * diff.stderr_mean() + kExactSlack;
            if (gap > worst_gap) {
                worst_gap = gap;
                if (gap > tol)
                    record_witness(report, scenario, worlds.front(), i, j, g, dev.desc, dev.ids,
                                   base_joint, dev_joint / k);
            }
            if (gap > tol) report.pass = false;
        }
    }
    if (report.pass) report.witness.reset();
    if (worst_gap == -std::numeric_limits<double>::infinity()) worst_gap = 0.0;
    report.statistics.push_back({"worstDeviationGap", worst_gap, std::nullopt});
    return report;
}

AuditReport nash_audit(const Scenario& scenario, const StrategyProfile& profile,
                       const DeviationFamily& family, long samples, std::uint64_t seed) {
    AuditReport report;
    report.audit_name = "nash";
    report.seed = seed;
    report.family = family.describe();

    auto worlds = realizations_for(scenario, samples, seed);
    report.samples = static_cast<long>(worlds.size());
    const bool exact = !sampled_prior(scenario);

    // Base expected utilities once.
    std::map<AgentId, double> base_util;
    for (const auto& a : scenario.graph.agents) base_util[a] = 0.0;
    std::vector<Transcript> base_runs;
    base_runs.reserve(worlds.size());
    for (const auto& r : worlds) {
        base_runs.push_back(run_realized(scenario, profile, r));
        for (const auto& a : scenario.graph.agents)
            base_util[a] += r.weight * utility_of(base_runs.back(), a);
    }

    double worst_improvement = 0.0;
    for (const auto& agent : scenario.graph.agents) {
        if (scenario.graph.incident_groups(agent).empty()) continue;
        auto deviations =
            unilateral_deviations(family, scenario.graph, agent, derive_seed(seed, stable_hash(agent)));
        for (const auto& dev : deviations) {
            StrategyProfile dev_profile = profile.with(agent, dev.ctor);
            double dev_util = 0.0;
            RunningStat diff;
            for (std::size_t w = 0; w < worlds.size(); ++w) {
                Transcript t = run_realized(scenario, dev_profile, worlds[w]);
                double u = utility_of(t, agent);
                dev_util += worlds[w].weight * u;
                if (!exact) diff.add(u - utility_of(base_runs[w], agent));
            }
            double improvement = dev_util - base_util[agent];
            double tol = exact ? kExactSlack : 3.0 * diff.stderr_mean() + kExactSlack;
            if (improvement > worst_improvement) {
                worst_improvement = improvement;
                if (improvement > tol)
                    record_witness(report, scenario, worlds.front(), agent, "", -1, dev.id,
                                   {{agent, dev.id}}, base_util[agent], dev_util);
            }
            if (improvement > tol) report.pass = false;
        }
    }
    if (report.pass) report.witness.reset();
    report.statistics.push_back({"worstImprovement", worst_improvement, std::nullopt});
    return report;
}

namespace {

double strike_of(const RealizedValuation& entry) {
    if (!entry.is_inspectable()) return entry.signed_value();
    const auto& ins = entry.spec.inspectable();
    return strike_price(ins.dist, ins.inspect_cost);
}

double kappa_of(const RealizedValuation& entry) {
    if (!entry.is_inspectable()) return entry.signed_value();
    return covered_call(entry.drawn, strike_of(entry));
}

}  // namespace

AuditReport smoothness_check(SmoothnessLemma lemma, const Scenario& scenario,
                             const StrategyProfile& profile, long samples, std::uint64_t seed) {
    AuditReport report;
    report.seed = seed;
    const MarketGraph& graph = scenario.graph;
    auto worlds = realizations_for(scenario, samples, seed);
    report.samples = static_cast<long>(worlds.size());

    switch (lemma) {
        case SmoothnessLemma::NonNeg:
            report.audit_name = "smoothness-nonneg";
            report.family = "halfValue";
            break;
        case SmoothnessLemma::Group:
            report.audit_name = "smoothness-group";
            report.family = "halfValue";
            break;
        case SmoothnessLemma::Inspect:
            report.audit_name = "smoothness-inspect";
            report.family = "zeroThenInspect";
            break;
        case SmoothnessLemma::RebatePair:
            report.audit_name = "smoothness-rebate";
            report.family = "pairwiseTruthful";
            break;
    }

    double worst_slack = std::numeric_limits<double>::infinity();
    auto note = [&](double lhs, double rhs, const Realization& r, const AgentId& i,
                    const AgentId& j, GroupRef g, const std::string& desc,
                    const std::map<AgentId, std::string>& ids) {
        double slack = lhs - rhs;
        if (slack < worst_slack) {
            worst_slack = slack;
            if (slack < -kExactSlack) record_witness(report, scenario, r, i, j, g, desc, ids, lhs, rhs);
        }
    };

    for (const auto& r : worlds) {
        if (lemma == SmoothnessLemma::RebatePair) {
            for (const auto& [i, j, g] : feasible_pairs(graph)) {
                StrategyProfile dev = pairwise_truthful(profile, graph, i, j);
                Transcript td = run_realized(scenario, dev, r);
                double lhs = utility_of(td, i) + utility_of(td, j);
                double rhs = surplus(r.types, graph, g) / 4.0;
                note(lhs, rhs, r, i, j, g, "pairwiseTruthful",
                     {{i, "truthful"}, {j, "truthful"}});
            }
            continue;
        }

        Transcript base = run_realized(scenario, profile, r);
        for (const auto& agent : graph.agents) {
            auto incident = graph.incident_groups(agent);
            if (incident.empty()) continue;
            bool inspect_lemma = lemma == SmoothnessLemma::Inspect;
            StrategyCtor dev_ctor = inspect_lemma ? zero_then_inspect_ctor() : half_value_ctor();
            std::string desc = inspect_lemma ? "zeroThenInspect" : "halfValue";
            StrategyProfile dev = profile.with(agent, dev_ctor);
            Transcript td = run_realized(scenario, dev, r);

            double dev_term;
            if (inspect_lemma) {
                // Covered-call utility: kappa of the matched entry minus the
                // net payment. Inspection costs are already folded into the
                // covered-call accounting, so they do not appear here.
                GroupRef mg = td.matched_group(agent);
                double kappa = mg >= 0 ? kappa_of(r.types.at(agent, mg)) : 0.0;
                dev_term = kappa - td.payments.at(agent);
            } else {
                dev_term = utility_of(td, agent);
            }
            std::map<AgentId, std::string> ids{{agent, desc}};

            if (lemma == SmoothnessLemma::Group) {
                double k = static_cast<double>(graph.max_group_size);
                for (GroupRef g : incident) {
                    double pay_sum = 0.0;
                    for (const auto& member : graph.groups[g])
                        pay_sum += base.group_price.at(member);
                    double lhs = dev_term + pay_sum / (k * k);
                    double rhs = r.types.at(agent, g).signed_value() / (2.0 * k * k);
                    note(lhs, rhs, r, agent, "", g, desc, ids);
                }
            } else {
                for (GroupRef g : incident) {
                    const Group& members = graph.groups[g];
                    if (members.size() != 2) continue;
                    const AgentId& partner = members[0] == agent ? members[1] : members[0];
                    double lhs = dev_term + base.group_price.at(agent) / 4.0 +
                                 base.group_price.at(partner) / 4.0;
                    const auto& entry = r.types.at(agent, g);
                    double rhs =
                        inspect_lemma ? kappa_of(entry) / 8.0 : entry.signed_value() / 8.0;
                    note(lhs, rhs, r, agent, partner, g, desc, ids);
                }
            }
        }
    }

    if (worst_slack == std::numeric_limits<double>::infinity()) worst_slack = 0.0;
    report.pass = worst_slack >= -kExactSlack;
    if (report.pass) report.witness.reset();
    report.statistics.push_back({"worstSlack", worst_slack, std::nullopt});
    return report;
}

PoaReport poa_report(const Scenario& scenario, const StrategyProfile& profile, long samples,
                     std::uint64_t seed, double stability_k, int jobs) {
    PoaReport out;
    out.welfare = expected_welfare(scenario, profile, samples, seed, jobs);
    out.opt = expected_opt(scenario, samples, derive_seed(seed, 0x6f7074ULL), jobs);
    if (out.opt.mean == 0.0)
        throw Fault("poa_report: optimal welfare is zero, ratio undefined (profile welfare " +
                    std::to_string(out.welfare.mean) + ")");
    out.ratio = out.welfare.mean / out.opt.mean;
    double rw = out.welfare.mean != 0.0 ? out.welfare.stderr_mean / std::abs(out.welfare.mean)
                                        : 0.0;
    double ro = out.opt.stderr_mean / std::abs(out.opt.mean);
    out.ratio_stderr = std::abs(out.ratio) * std::sqrt(rw * rw + ro * ro);
    std::ostringstream name;
    if (scenario.graph.max_group_size > 2) {
        double k = scenario.graph.max_group_size;
        out.reference_bound = 1.0 / (2.0 * k * k);
        name << "1/(2k^2), k=" << scenario.graph.max_group_size;
    } else if (scenario.payment_rule == PaymentRule::QuarterRebate) {
        out.reference_bound = 1.0 / (4.0 * stability_k);
        name << "1/(4k), k=" << stability_k;
    } else {
        out.reference_bound = 1.0 / 8.0;
        name << "1/8";
    }
    out.bound_name = name.str();
    return out;
}

GridEquilibriumScan scan_grid_equilibria(const Scenario& scenario,
                                         const std::vector<double>& scales,
                                         std::uint64_t tie_seed) {
    if (!std::holds_alternative<DegeneratePrior>(scenario.prior))
        throw Fault("scan_grid_equilibria: degenerate priors only");
    const MarketGraph& graph = scenario.graph;
    const int n = static_cast<int>(graph.agents.size());
    const int levels = static_cast<int>(scales.size());
    TypeProfile types = realize_types(scenario.prior, 0);
    GridEquilibriumScan scan;
    scan.opt = max_weight_matching(surplus_instance(graph, types)).total_weight;
    scan.min_equilibrium_welfare = std::numeric_limits<double>::infinity();

    auto profile_for = [&](const std::vector<int>& pick) {
        StrategyProfile p;
        for (int a = 0; a < n; ++a) {
            std::map<GroupRef, GridPoint> coeffs;
            for (GroupRef g : graph.incident_groups(graph.agents[a]))
                coeffs[g] = GridPoint{scales[static_cast<std::size_t>(pick[a])], 0.0};
            p.ctors[graph.agents[a]] = linear_ctor(std::move(coeffs));
        }
        return p;
    };
    auto run = [&](const StrategyProfile& p) {
        return run_match(graph, types, p, scenario.payment_rule, tie_seed);
    };

    std::vector<int> pick(n, 0);
    for (;;) {
        ++scan.profiles;
        Transcript base = run(profile_for(pick));
        bool is_eq = true;
        for (int a = 0; a < n && is_eq; ++a) {
            for (int alt = 0; alt < levels && is_eq; ++alt) {
                if (alt == pick[a]) continue;
                std::vector<int> dev = pick;
                dev[a] = alt;
                Transcript td = run(profile_for(dev));
                if (td.utilities.at(graph.agents[a]) > base.utilities.at(graph.agents[a]) + 1e-9)
                    is_eq = false;
            }
        }
        if (is_eq) {
            ++scan.equilibria;
            scan.min_equilibrium_welfare = std::min(scan.min_equilibrium_welfare, base.welfare);
            if (scan.opt > 0.0) scan.min_ratio = std::min(scan.min_ratio, base.welfare / scan.opt);
        }
        int a = 0;
        while (a < n && ++pick[a] == levels) pick[a++] = 0;
        if (a == n) break;
    }
    if (scan.equilibria == 0) scan.min_equilibrium_welfare = 0.0;
    return scan;
}

ReplayResult replay_witness(const Scenario& scenario, const StrategyProfile& profile,
                            const AuditReport& report) {
    if (!report.witness) throw Fault("replay_witness: report has no witness");
    const AuditWitness& w = *report.witness;

    Realization r;
    r.realization_seed = w.realization_seed;
    r.run_seed = w.run_seed;
    r.outcome_index = w.outcome_index;
    if (w.outcome_index) {
        auto support = enumerate_support(scenario.prior, kEnumerationLimit);
        r.types = support.at(*w.outcome_index).first;
        r.weight = support.at(*w.outcome_index).second;
    } else {
        r.types = realize_types(scenario.prior, derive_seed(w.realization_seed, kTypesTag));
    }

    StrategyProfile dev_profile = profile;
    if (!w.deviation_ids.empty()) {
        for (const auto& [agent, id] : w.deviation_ids)
            dev_profile.ctors[agent] = resolve_ctor(id);
    } else {
        for (const auto& [agent, sched] : w.overrides)
            dev_profile.ctors[agent] = fixed_schedule_ctor(sched);
    }

    ReplayResult res;
    if (report.audit_name == "expost") {
        Transcript t = run_realized(scenario, profile, r);
        double joint = utility_of(t, w.agent) + utility_of(t, w.partner);
        double s = surplus(r.types, scenario.graph, w.group);
        res.violation = s / report.bound - joint;
        res.transcript = std::move(t);
        return res;
    }
    if (report.audit_name == "exante" || report.audit_name == "nash") {
        // Expectation audits: recompute both expectations over the same
        // realization set, then hand back the witness-world deviation run.
        auto worlds = realizations_for(scenario, report.samples, report.seed);
        double base = 0.0, dev = 0.0;
        for (const auto& world : worlds) {
            Transcript tb = run_realized(scenario, profile, world);
            Transcript td = run_realized(scenario, dev_profile, world);
            if (report.audit_name == "nash") {
                base += world.weight * utility_of(tb, w.agent);
                dev += world.weight * utility_of(td, w.agent);
            } else {
                base += world.weight * (utility_of(tb, w.agent) + utility_of(tb, w.partner));
                dev += world.weight * (utility_of(td, w.agent) + utility_of(td, w.partner));
            }
        }
        res.violation = (report.audit_name == "exante" ? dev / report.bound : dev) - base;
        res.transcript = run_realized(scenario, dev_profile, r);
        return res;
    }
    // Smoothness lemmas: pointwise recomputation at the witness realization.
    Transcript base = run_realized(scenario, profile, r);
    Transcript td = run_realized(scenario, dev_profile, r);
    double lhs = 0.0, rhs = 0.0;
    if (report.audit_name == "smoothness-rebate") {
        lhs = utility_of(td, w.agent) + utility_of(td, w.partner);
        rhs = surplus(r.types, scenario.graph, w.group) / 4.0;
    } else if (report.audit_name == "smoothness-group") {
        double k = static_cast<double>(scenario.graph.max_group_size);
        double pay_sum = 0.0;
        for (const auto& member : scenario.graph.groups[w.group])
            pay_sum += base.group_price.at(member);
        lhs = utility_of(td, w.agent) + pay_sum / (k * k);
        rhs = r.types.at(w.agent, w.group).signed_value() / (2.0 * k * k);
    } else if (report.audit_name == "smoothness-inspect") {
        GroupRef mg = td.matched_group(w.agent);
        double kappa = mg >= 0 ? kappa_of(r.types.at(w.agent, mg)) : 0.0;
        lhs = kappa - td.payments.at(w.agent) + base.group_price.at(w.agent) / 4.0 +
              base.group_price.at(w.partner) / 4.0;
        rhs = kappa_of(r.types.at(w.agent, w.group)) / 8.0;
    } else if (report.audit_name == "smoothness-nonneg") {
        lhs = utility_of(td, w.agent) + base.group_price.at(w.agent) / 4.0 +
              base.group_price.at(w.partner) / 4.0;
        rhs = r.types.at(w.agent, w.group).signed_value() / 8.0;
    } else {
        throw Fault("replay_witness: unknown audit " + report.audit_name);
    }
    res.violation = rhs - lhs;
    res.transcript = std::move(td);
    return res;
}

}  // namespace mm
