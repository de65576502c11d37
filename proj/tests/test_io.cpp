#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "mm/instances.hpp"
#include "mm/scenario_io.hpp"

using namespace mm;

TEST_CASE("scenario documents round-trip through JSON") {
    for (Scenario original : {instances::refusal_scenario(), instances::fig1_scenario(10.0),
                              instances::pandora_binary_scenario(),
                              instances::group_demo_scenario(), instances::lovers_scenario(3)}) {
        Json j = scenario_to_json(original);
        Scenario back = scenario_from_json(j);
        CHECK(scenario_to_json(back).dump() == j.dump());
        CHECK(validate_scenario(back).ok());
    }
}

TEST_CASE("distribution round trip") {
    for (const Distribution& d :
         {Distribution::point(3.5), Distribution::uniform(0.0, 1.0),
          Distribution::finite({{0.0, 0.5}, {10.0, 0.5}})}) {
        CHECK(distribution_from_json(distribution_to_json(d)) == d);
    }
    CHECK_THROWS_AS(distribution_from_json(Json{{"kind", "cauchy"}}), Fault);
}

TEST_CASE("normative field names are accepted as written") {
    const char* text = R"({
      "graph": {
        "agents": ["A", "B", "C"],
        "groups": [["A", "C"], ["B", "C"]],
        "maxGroupSize": 2,
        "sideLabels": {"A": "Bidder", "B": "Bidder", "C": "Asker"}
      },
      "prior": {
        "kind": "degenerate",
        "entries": [
          {"agent": "A", "group": 0, "kind": "value", "amount": 11.0},
          {"agent": "C", "group": 0, "kind": "cost", "amount": 0.0},
          {"agent": "B", "group": 1, "kind": "value", "amount": 10.0},
          {"agent": "C", "group": 1, "kind": "cost", "amount": 0.0}
        ]
      },
      "paymentRule": "quarterRebate",
      "clock": {"pMax": 24.0},
      "defaultSeed": 7
    })";
    Scenario sc = scenario_from_json(Json::parse(text));
    CHECK(sc.graph.agents.size() == 3);
    CHECK(sc.payment_rule == PaymentRule::QuarterRebate);
    CHECK(sc.p_max == 24.0);
    CHECK(sc.default_seed == 7);
    CHECK(validate_scenario(sc).ok());
    Transcript t = run_scenario(sc, truthful_profile(sc.graph), 7);
    REQUIRE(t.matches.size() == 1);
    CHECK(t.matches[0].clearing_price == 11.0);
}

TEST_CASE("transcripts serialize deterministically with stable keys") {
    Scenario sc = instances::fig1_scenario(10.0);
    Transcript t = run_scenario(sc, truthful_profile(sc.graph), 3);
    Json j = transcript_to_json(t, sc.graph);
    CHECK(j.begin().key() == "seedUsed");
    CHECK(j.contains("matches"));
    CHECK(j["matches"][0]["clearingPrice"] == 11.0);
    CHECK(j["payments"].contains("A"));
    CHECK(transcript_to_json(t, sc.graph).dump() == j.dump());
}

TEST_CASE("audit reports serialize with witness replay transcripts") {
    Scenario sc = instances::refusal_scenario();
    StrategyProfile profile = refusal_profile(sc.graph);
    auto report = ex_post_audit(sc, profile, 4.0, 1, 1);
    Json j = audit_report_to_json(report, sc, profile);
    CHECK(j["verdict"] == "fail");
    CHECK(j["witness"]["violation"].get<double>() == doctest::Approx(0.25));
    CHECK(j["witness"]["replayViolation"].get<double>() ==
          j["witness"]["violation"].get<double>());
    CHECK(j["witness"]["transcript"].contains("payments"));

    std::string csv = audit_report_csv_row(report);
    CHECK(csv.rfind("expost,fail,", 0) == 0);
    CHECK(audit_report_csv_header() == "auditName,verdict,statistic,bound,samples,seed");
}

TEST_CASE("scenario files load from disk and bad paths fault") {
    std::string path = "mm_io_test_scenario.json";
    save_scenario(instances::fig1_scenario(10.0), path);
    Scenario sc = load_scenario(path);
    CHECK(sc.graph.agents.size() == 3);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_scenario("does_not_exist.json"), Fault);

    std::ofstream bad("mm_io_test_bad.json");
    bad << "{ not json";
    bad.close();
    CHECK_THROWS_AS(load_scenario("mm_io_test_bad.json"), Fault);
    std::remove("mm_io_test_bad.json");
}

TEST_CASE("profile specs resolve ids and per-agent files") {
    Scenario sc = instances::fig1_scenario(10.0);
    StrategyProfile p = profile_from_spec("truthful", sc.graph);
    CHECK(p.ctors.size() == 3);

    std::string path = "mm_io_test_profile.json";
    {
        std::ofstream out(path);
        out << R"({"*": "truthful", "B": "constant:12.0"})";
    }
    StrategyProfile q = profile_from_spec(path, sc.graph);
    Transcript t = run_scenario(sc, q, 1);
    CHECK(t.utilities.at("B") == doctest::Approx(1.0));
    std::remove(path.c_str());

    CHECK_THROWS_AS(profile_from_spec("missing_file.json", sc.graph), Fault);
}
