#include "mm/pandora.hpp"

#include <algorithm>
#include <cmath>

#include "mm/parallel.hpp"
#include "mm/rng.hpp"

namespace mm {

namespace {
constexpr double kStrikeTol = 1e-9;
constexpr int kMaxBisectIters = 200;
}  // namespace

double strike_price(const Distribution& dist, double inspect_cost) {
    if (inspect_cost < 0.0) throw Fault("strike_price: negative inspection cost");
    if (dist.mean() < inspect_cost)
        throw Fault("strike_price: mean(D) < r, no nonnegative strike exists");

    if (auto* p = dist.as_point()) return p->value - inspect_cost;

    if (auto* u = dist.as_uniform()) {
        if (inspect_cost == 0.0) return u->hi;
        double width = u->hi - u->lo;
        // Residual is (hi - s)^2 / (2 width) for s inside the interval and
        // mean - s below it.
        double inside = u->hi - std::sqrt(2.0 * inspect_cost * width);
        if (width > 0.0 && inside >= u->lo) return inside;
        return dist.mean() - inspect_cost;
    }

    // Finite support: the residual E[(v - s)^+] is piecewise linear, convex
    // and strictly decreasing wherever positive, so bisection on
    // [0, max support] nails it. The slope is at most 1 in magnitude, so the
    // bracket width bounds the residual error. With r = 0 every point beyond
    // the essential max solves the equation; the largest in-range solution,
    // the essential max itself, is returned.
    double lo = 0.0;
    double hi = std::max(dist.max_support(), 0.0);
    if (inspect_cost == 0.0) return hi;
    for (int i = 0; i < kMaxBisectIters && hi - lo > kStrikeTol * 0.5; ++i) {
        double mid = 0.5 * (lo + hi);
        if (dist.expected_excess(mid) > inspect_cost)
            lo = mid;
        else
            hi = mid;
    }
    double s = 0.5 * (lo + hi);
    if (std::abs(dist.expected_excess(s) - inspect_cost) > kStrikeTol)
        throw Fault("strike_price: bisection failed to meet the residual");
    return s;
}

double covered_call(double value, double strike) { return std::min(strike, value); }

std::vector<PandoraIndex> pandora_indices(const MarketGraph& graph, const TypeProfile& types) {
    std::vector<PandoraIndex> out;
    for (const auto& [inc, val] : types.entries) {
        if (!val.is_inspectable()) continue;
        const auto& ins = val.spec.inspectable();
        out.push_back({inc.agent, inc.group, strike_price(ins.dist, ins.inspect_cost),
                       ins.inspect_cost, ins.dist});
    }
    (void)graph;
    return out;
}

ExerciseAuditReport exercise_audit(const MarketGraph& graph,
                                   const std::vector<Transcript>& transcripts,
                                   const std::vector<TypeProfile>& types) {
    if (transcripts.size() != types.size())
        throw Fault("exercise_audit: transcript/profile count mismatch");
    ExerciseAuditReport report;
    for (std::size_t k = 0; k < transcripts.size(); ++k) {
        const Transcript& t = transcripts[k];
        for (const auto& inc : t.inspected) {
            const auto& entry = types[k].at(inc.agent, inc.group);
            if (!entry.is_inspectable()) continue;
            ++report.audited;
            const auto& ins = entry.spec.inspectable();
            double sigma = strike_price(ins.dist, ins.inspect_cost);
            if (entry.drawn > sigma && !t.matched.count(inc)) {
                report.pass = false;
                report.witness = ExerciseWitness{k, inc, entry.drawn, sigma};
                return report;
            }
        }
    }
    (void)graph;
    return report;
}

CoveredCallGap covered_call_gap(const Scenario& scenario, const StrategyProfile& profile,
                                long samples, std::uint64_t seed, int jobs) {
    CoveredCallGap gap;
    using PerRun = std::vector<std::pair<double, double>>;  // (lhs, rhs) per incidence

    // Fixed incidence order shared by every sample.
    std::vector<Incidence> incidences;
    {
        TypeProfile probe = realize_types(scenario.prior, derive_seed(seed, 0x70726f6265ULL));
        for (const auto& [inc, entry] : probe.entries)
            if (entry.is_inspectable()) incidences.push_back(inc);
    }

    auto one_sample = [&](long s) {
        std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(s));
        TypeProfile types = realize_types(scenario.prior, sample_seed);
        RunOptions opt;
        opt.p_max = scenario.p_max;
        Transcript t = run_match(scenario.graph, types, profile, scenario.payment_rule,
                                 derive_seed(sample_seed, 0x72756eULL), opt);
        PerRun out(incidences.size(), {0.0, 0.0});
        for (std::size_t k = 0; k < incidences.size(); ++k) {
            const Incidence& inc = incidences[k];
            const auto& entry = types.at(inc.agent, inc.group);
            if (!entry.is_inspectable()) continue;  // joint priors may mix kinds
            const auto& ins = entry.spec.inspectable();
            bool inspected = t.inspected.count(inc) > 0;
            bool matched = t.matched.count(inc) > 0;
            out[k].first = (matched ? entry.drawn : 0.0) - (inspected ? ins.inspect_cost : 0.0);
            if (matched)
                out[k].second = covered_call(entry.drawn, strike_price(ins.dist, ins.inspect_cost));
        }
        return out;
    };
    auto values = parallel_map<PerRun>(samples, jobs, one_sample);

    RunningStat lhs_stat, rhs_stat, diff_stat;
    std::vector<RunningStat> inc_lhs(incidences.size()), inc_rhs(incidences.size()),
        inc_diff(incidences.size());
    for (const auto& run : values) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < run.size(); ++k) {
            lhs += run[k].first;
            rhs += run[k].second;
            inc_lhs[k].add(run[k].first);
            inc_rhs[k].add(run[k].second);
            inc_diff[k].add(run[k].first - run[k].second);
        }
        lhs_stat.add(lhs);
        rhs_stat.add(rhs);
        diff_stat.add(lhs - rhs);
    }
    gap.lhs = lhs_stat.mean();
    gap.rhs = rhs_stat.mean();
    gap.stderr_diff = diff_stat.stderr_mean();
    gap.samples = samples;
    gap.violation = gap.lhs > gap.rhs + 3.0 * gap.stderr_diff + 1e-12;
    for (std::size_t k = 0; k < incidences.size(); ++k) {
        IncidenceGap ig{incidences[k], inc_lhs[k].mean(), inc_rhs[k].mean(),
                        inc_diff[k].stderr_mean()};
        if (ig.lhs > ig.rhs + 3.0 * ig.stderr_diff + 1e-12) gap.violation = true;
        gap.per_incidence.push_back(ig);
    }
    return gap;
}

}  // namespace mm
