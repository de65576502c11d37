// mm — Marshallian Match toolkit: scenario runs, stability/welfare audits,
// strike-price utilities, and self-contained demonstration targets.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mm/auditors.hpp"
#include "mm/instances.hpp"
#include "mm/pandora.hpp"
#include "mm/repro.hpp"
#include "mm/scenario_io.hpp"

namespace {

struct CommonOpts {
    std::string scenario_path;
    std::string profile_spec = "truthful";
    std::string rule_override;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long samples = 1000;
    double k = 4.0;
    int jobs = 1;
    std::string out_path;
    std::string csv_path;
};

std::uint64_t effective_seed(const CommonOpts& opts, const mm::Scenario& scenario) {
    if (opts.seed_set) return opts.seed;
    if (const char* env = std::getenv("MM_SEED")) return std::strtoull(env, nullptr, 10);
    return scenario.default_seed;
}

mm::Scenario load_checked(const CommonOpts& opts) {
    mm::Scenario sc = mm::load_scenario(opts.scenario_path);
    if (!opts.rule_override.empty()) {
        if (opts.rule_override == "payYourBid")
            sc.payment_rule = mm::PaymentRule::PayYourBid;
        else if (opts.rule_override == "quarterRebate")
            sc.payment_rule = mm::PaymentRule::QuarterRebate;
        else
            throw mm::Fault("unknown payment rule: " + opts.rule_override);
    }
    auto validation = mm::validate_scenario(sc);
    if (!validation.ok()) {
        std::string msg = "scenario is invalid:";
        for (const auto& v : validation.violations)
            msg += "\n  - " + v.invariant + " (" + v.location + ")";
        throw mm::Fault(msg);
    }
    return sc;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw mm::Fault("cannot write " + path);
    out << text;
}

void emit_report(const mm::AuditReport& report, const mm::Scenario& scenario,
                 const mm::StrategyProfile& profile, const CommonOpts& opts) {
    mm::Json j = mm::audit_report_to_json(report, scenario, profile);
    std::string body = j.dump(2) + "\n";
    if (!opts.out_path.empty())
        write_text(opts.out_path, body);
    else
        std::cout << body;
    if (!opts.csv_path.empty())
        write_text(opts.csv_path,
                   mm::audit_report_csv_header() + "\n" + mm::audit_report_csv_row(report) + "\n");
    std::cout << report.audit_name << ": " << (report.pass ? "pass" : "fail") << "\n";
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_profile = true) {
    cmd->add_option("--scenario", opts.scenario_path, "Scenario JSON file")->required();
    if (with_profile)
        cmd->add_option("--profile", opts.profile_spec,
                        "Strategy id (truthful, halfValue, zeroThenInspect, refusal, "
                        "constant:{...}, linear:{...}) or profile JSON file");
    cmd->add_option("--rule", opts.rule_override, "Override payment rule");
    cmd->add_option("--seed", opts.seed, "Seed (overrides MM_SEED and the scenario default)")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--samples", opts.samples, "Monte Carlo samples");
    cmd->add_option("--k", opts.k, "Stability parameter");
    cmd->add_option("--jobs", opts.jobs, "Worker threads for sample loops");
    cmd->add_option("--out", opts.out_path, "Write the JSON artifact here");
    cmd->add_option("--csv", opts.csv_path, "Write a CSV summary row here");
}

mm::DeviationFamily family_from_flags(const std::string& name, const std::string& bids_csv,
                                      const std::string& asks_csv) {
    auto parse_csv = [](const std::string& csv) {
        std::vector<double> out;
        std::string token;
        std::istringstream is(csv);
        while (std::getline(is, token, ',')) {
            if (!token.empty()) out.push_back(std::stod(token));
        }
        return out;
    };
    if (!bids_csv.empty() || !asks_csv.empty())
        return mm::DeviationFamily::absolute_levels(parse_csv(bids_csv), parse_csv(asks_csv));
    if (name == "pairwiseTruthful") return mm::DeviationFamily::pairwise_truthful();
    if (name == "halfValue") return mm::DeviationFamily::half_value();
    if (name == "zeroThenInspect") return mm::DeviationFamily::zero_then_inspect();
    if (name == "grid" || name.empty())
        return mm::DeviationFamily::constant_grid(mm::default_grid());
    throw mm::Fault("unknown deviation family: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Marshallian Match simulator and audit suite"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string family_name, grid_bids, grid_asks, lemma_name, dist_json, repro_name;
    double inspect_cost = 0.0;

    auto* run_cmd = app.add_subcommand("run", "Run one match and emit the transcript");
    add_common(run_cmd, opts);

    auto* audit_cmd = app.add_subcommand("audit", "Stability / equilibrium / smoothness audits");
    audit_cmd->require_subcommand(1);
    auto* expost_cmd = audit_cmd->add_subcommand("expost", "Per-realization pair stability");
    auto* exante_cmd = audit_cmd->add_subcommand("exante", "Expected pair stability");
    auto* nash_cmd = audit_cmd->add_subcommand("nash", "Unilateral grid equilibrium");
    auto* smooth_cmd = audit_cmd->add_subcommand("smoothness", "Per-realization lemma checks");
    for (auto* cmd : {expost_cmd, exante_cmd, nash_cmd, smooth_cmd}) add_common(cmd, opts);
    for (auto* cmd : {exante_cmd, nash_cmd}) {
        cmd->add_option("--family", family_name,
                        "pairwiseTruthful | halfValue | zeroThenInspect | grid");
        cmd->add_option("--grid-bids", grid_bids, "Comma list of absolute bid levels");
        cmd->add_option("--grid-asks", grid_asks, "Comma list of absolute ask levels");
    }
    smooth_cmd->add_option("--lemma", lemma_name, "nonneg | group | inspect | rebatePair")
        ->required();

    auto* poa_cmd = app.add_subcommand("poa", "Welfare ratio against the matching oracle");
    add_common(poa_cmd, opts);

    auto* opt_cmd = app.add_subcommand("opt", "Expected optimal matching welfare");
    add_common(opt_cmd, opts, /*with_profile=*/false);

    auto* pandora_cmd = app.add_subcommand("pandora", "Optimal-search utilities");
    auto* strike_cmd = pandora_cmd->add_subcommand("strike", "Solve the strike price");
    strike_cmd->add_option("--dist", dist_json, "Distribution JSON")->required();
    strike_cmd->add_option("--cost", inspect_cost, "Inspection cost r")->required();

    auto* repro_cmd = app.add_subcommand("repro", "Built-in demonstration targets");
    repro_cmd->add_option("name", repro_name, "Target name or 'all'")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            mm::Scenario sc = load_checked(opts);
            auto profile = mm::profile_from_spec(opts.profile_spec, sc.graph);
            mm::Transcript t = mm::run_scenario(sc, profile, effective_seed(opts, sc));
            std::string body = mm::transcript_to_json(t, sc.graph).dump(2) + "\n";
            if (!opts.out_path.empty())
                write_text(opts.out_path, body);
            else
                std::cout << body;
            return 0;
        }
        if (*audit_cmd) {
            mm::Scenario sc = load_checked(opts);
            auto profile = mm::profile_from_spec(opts.profile_spec, sc.graph);
            std::uint64_t seed = effective_seed(opts, sc);
            mm::AuditReport report;
            if (*expost_cmd) {
                report = mm::ex_post_audit(sc, profile, opts.k, opts.samples, seed);
            } else if (*exante_cmd) {
                auto family = family_from_flags(family_name.empty() ? "pairwiseTruthful"
                                                                    : family_name,
                                                grid_bids, grid_asks);
                report = mm::ex_ante_audit(sc, profile, opts.k, family, opts.samples, seed);
            } else if (*nash_cmd) {
                auto family = family_from_flags(family_name, grid_bids, grid_asks);
                report = mm::nash_audit(sc, profile, family, opts.samples, seed);
            } else {
                mm::SmoothnessLemma lemma;
                if (lemma_name == "nonneg")
                    lemma = mm::SmoothnessLemma::NonNeg;
                else if (lemma_name == "group")
                    lemma = mm::SmoothnessLemma::Group;
                else if (lemma_name == "inspect")
                    lemma = mm::SmoothnessLemma::Inspect;
                else if (lemma_name == "rebatePair")
                    lemma = mm::SmoothnessLemma::RebatePair;
                else
                    throw mm::Fault("unknown lemma: " + lemma_name);
                report = mm::smoothness_check(lemma, sc, profile, opts.samples, seed);
            }
            emit_report(report, sc, profile, opts);
            return report.pass ? 0 : 2;
        }
        if (*poa_cmd) {
            mm::Scenario sc = load_checked(opts);
            auto profile = mm::profile_from_spec(opts.profile_spec, sc.graph);
            mm::PoaReport report =
                mm::poa_report(sc, profile, opts.samples, effective_seed(opts, sc), opts.k,
                               opts.jobs);
            mm::Json j;
            j["welfare"] = report.welfare.mean;
            j["welfareStderr"] = report.welfare.stderr_mean;
            j["opt"] = report.opt.mean;
            j["optStderr"] = report.opt.stderr_mean;
            j["ratio"] = report.ratio;
            j["ratioStderr"] = report.ratio_stderr;
            j["referenceBound"] = report.reference_bound;
            j["boundName"] = report.bound_name;
            std::string body = j.dump(2) + "\n";
            if (!opts.out_path.empty())
                write_text(opts.out_path, body);
            else
                std::cout << body;
            return 0;
        }
        if (*opt_cmd) {
            mm::Scenario sc = load_checked(opts);
            auto value = mm::expected_opt(sc, opts.samples, effective_seed(opts, sc), opts.jobs);
            std::cout << "expectedOpt " << value.mean << " stderr " << value.stderr_mean
                      << " samples " << value.samples << "\n";
            return 0;
        }
        if (*strike_cmd) {
            mm::Distribution dist =
                mm::distribution_from_json(mm::Json::parse(dist_json));
            double sigma = mm::strike_price(dist, inspect_cost);
            std::cout << "strike " << sigma << " residual "
                      << dist.expected_excess(sigma) - inspect_cost << "\n";
            return 0;
        }
        if (*repro_cmd) {
            bool ok = true;
            if (repro_name == "all") {
                for (const auto& name : mm::repro_names()) ok = mm::run_repro(name, std::cout) && ok;
            } else {
                ok = mm::run_repro(repro_name, std::cout);
            }
            return ok ? 0 : 2;
        }
    } catch (const mm::Fault& e) {
        std::cerr << "fault: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
