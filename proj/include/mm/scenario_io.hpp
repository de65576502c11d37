#pragma once

#include <string>

#include <json.hpp>

#include "mm/auditors.hpp"
#include "mm/engine.hpp"
#include "mm/market.hpp"

namespace mm {

using Json = nlohmann::ordered_json;

// Scenario documents. Field names are normative; see docs/scenario-format.md.
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// Transcripts serialize with stable key ordering so identical runs produce
// identical bytes.
Json transcript_to_json(const Transcript& t, const MarketGraph& graph);

Json audit_report_to_json(const AuditReport& r, const Scenario& scenario,
                          const StrategyProfile& profile);
/// Summary row: auditName, verdict, statistic, bound, samples, seed.
std::string audit_report_csv_row(const AuditReport& r);
std::string audit_report_csv_header();

Json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const Json& j);

Json bid_schedule_to_json(const BidSchedule& s);

/// Profile documents: either a registry id for everyone or a map
/// agent -> id.
StrategyProfile profile_from_spec(const std::string& spec, const MarketGraph& graph);

}  // namespace mm
