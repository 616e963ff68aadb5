#include <doctest.h>

#include <nlohmann/json.hpp>

#include "bocd/io.hpp"
#include "bocd/run_config.hpp"

using namespace bocd;

TEST_CASE("csv rows parse integers, ISO timestamps and features") {
  const auto a = parse_csv_row("12,3.5", 0);
  CHECK(a.time == 12);
  CHECK(a.value == doctest::Approx(3.5));

  const auto b = parse_csv_row("2023-01-02T00:00:00,1.25", 0);
  CHECK(b.time == 1672617600);

  const auto c = parse_csv_row("7,0.5,1.0,2.0", 2);
  REQUIRE(c.features.size() == 2);
  CHECK(c.features[1] == doctest::Approx(2.0));

  CHECK_THROWS_AS((void)parse_csv_row("7,abc", 0), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_csv_row("7,1.0", 1), std::invalid_argument);
  CHECK(looks_like_header("time,value"));
  CHECK_FALSE(looks_like_header("3,4.0"));
  CHECK_FALSE(looks_like_header("2023-01-02T00:00:00,4.0"));
}

TEST_CASE("run config round-trips through json") {
  RunConfig cfg;
  cfg.detector.engine = EngineKind::Bocd;
  cfg.detector.hp.p0 = 0.05;
  cfg.detector.hp.q0 = 0.15;
  cfg.detector.hp.u_c = 120;
  cfg.detector.hp.trunc_mass = 0.001;
  cfg.detector.hp.min_range_len = 12;
  cfg.value_bounds = NormalizeBounds{0.0, 10.0};
  cfg.strict = true;

  const auto j = run_config_to_json(cfg);
  const auto back = run_config_from_json(j);
  CHECK(run_config_to_json(back) == j);
  CHECK(back.detector.engine == EngineKind::Bocd);
  CHECK(back.detector.hp.q0 == doctest::Approx(0.15));
  REQUIRE(back.detector.hp.trunc_mass.has_value());
  CHECK(*back.detector.hp.trunc_mass == doctest::Approx(0.001));
  REQUIRE(back.value_bounds.has_value());
  CHECK(back.value_bounds->hi == doctest::Approx(10.0));
}

TEST_CASE("invalid configs are rejected") {
  nlohmann::json j;
  j["hyperparams"]["p0"] = 1.5;
  CHECK_THROWS_AS((void)run_config_from_json(j), std::invalid_argument);

  nlohmann::json j2;
  j2["engine"] = "bocd";
  j2["endpoint_mode"] = "joint";  // joint tables need the linear engine
  CHECK_THROWS_AS((void)run_config_from_json(j2), std::invalid_argument);

  nlohmann::json j3;
  j3["hyperparams"]["u_a"] = 400;  // violates delta_t < u_a < u_c
  CHECK_THROWS_AS((void)run_config_from_json(j3), std::invalid_argument);
}

TEST_CASE("event records carry the versioned schema") {
  DetectionEvent ev{EventKind::CollectiveAnomaly, 52, 57, 0.91, 60};
  const auto j = event_to_json(ev, "bocd-ar");
  CHECK(j["schema"] == "bocd-event/1");
  CHECK(j["kind"] == "collective_anomaly");
  CHECK(j["interval"][0] == 52);
  CHECK(j["interval"][1] == 57);
  CHECK(j["alert_time"] == 60);
  CHECK(j["engine"] == "bocd-ar");

  DetectionEvent cp{EventKind::ChangePoint, 98, 98, 0.7, 103};
  const auto jc = event_to_json(cp, "bocd");
  CHECK(jc["location"] == 98);
  CHECK(jc.find("interval") == jc.end());
}

TEST_CASE("ground truth round-trips through json") {
  SimSeries s;
  s.seed = 5;
  s.change_points = {75, 175};
  s.anomalies.push_back({52, 55, EventKind::CollectiveAnomaly, 2.0});
  s.anomalies.push_back({300, 303, EventKind::SpuriousAnomaly, -4.0});
  const auto j = ground_truth_to_json(s);
  const auto back = ground_truth_from_json(j);
  CHECK(back.change_points == s.change_points);
  REQUIRE(back.anomalies.size() == 2);
  CHECK(back.anomalies[1].kind == EventKind::SpuriousAnomaly);
}
