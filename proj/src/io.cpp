#include "bocd/io.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <ctime>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "bocd/run_config.hpp"

namespace bocd {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

}  // namespace

std::int64_t parse_iso_time(const std::string& text) {
  std::tm tm{};
  std::istringstream ss(text);
  ss >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (ss.fail()) {
    std::istringstream ss2(text);
    ss2 >> std::get_time(&tm, "%Y-%m-%d %H:%M:%S");
    if (ss2.fail()) throw std::invalid_argument("bad timestamp: " + text);
  }
  return static_cast<std::int64_t>(timegm(&tm));
}

bool looks_like_header(const std::string& line) {
  const auto fields = split_fields(line);
  if (fields.empty()) return false;
  try {
    (void)parse_double(fields[0]);
    return false;
  } catch (const std::exception&) {
    try {
      (void)parse_iso_time(fields[0]);
      return false;
    } catch (const std::exception&) {
      return true;
    }
  }
}

CsvRow parse_csv_row(const std::string& line, int feature_dim) {
  const auto fields = split_fields(line);
  if (static_cast<int>(fields.size()) != 2 + feature_dim) {
    throw std::invalid_argument("expected " + std::to_string(2 + feature_dim) +
                                " fields, got " +
                                std::to_string(fields.size()));
  }
  CsvRow row;
  std::int64_t t = 0;
  const auto& f0 = fields[0];
  auto [p, ec] = std::from_chars(f0.data(), f0.data() + f0.size(), t);
  if (ec == std::errc() && p == f0.data() + f0.size()) {
    row.time = t;
  } else {
    row.time = parse_iso_time(f0);
  }
  row.value = parse_double(fields[1]);
  for (int i = 0; i < feature_dim; ++i) {
    row.features.push_back(parse_double(fields[2 + i]));
  }
  return row;
}

nlohmann::json event_to_json(const DetectionEvent& ev,
                             const std::string& engine) {
  nlohmann::json j;
  j["schema"] = "bocd-event/1";
  j["kind"] = event_kind_name(ev.kind);
  if (ev.kind == EventKind::ChangePoint) {
    j["location"] = ev.start;
  } else {
    j["interval"] = {ev.start, ev.end};
  }
  j["posterior"] = ev.posterior;
  j["alert_time"] = ev.alert_time;
  j["engine"] = engine;
  return j;
}

nlohmann::json ground_truth_to_json(const SimSeries& series) {
  nlohmann::json j;
  j["schema"] = "bocd-truth/1";
  j["seed"] = series.seed;
  j["change_points"] = series.change_points;
  nlohmann::json an = nlohmann::json::array();
  for (const auto& a : series.anomalies) {
    an.push_back({{"start", a.start},
                  {"end", a.end},
                  {"kind", event_kind_name(a.kind)},
                  {"mean_shift", a.mean_shift}});
  }
  j["anomalies"] = an;
  return j;
}

SimSeries ground_truth_from_json(const nlohmann::json& j) {
  SimSeries s;
  s.seed = j.value("seed", 0ULL);
  for (const auto& cp : j.at("change_points")) {
    s.change_points.push_back(cp.get<std::int64_t>());
  }
  for (const auto& a : j.at("anomalies")) {
    PlantedAnomaly an;
    an.start = a.at("start").get<std::int64_t>();
    an.end = a.at("end").get<std::int64_t>();
    an.mean_shift = a.value("mean_shift", 0.0);
    const std::string kind = a.at("kind").get<std::string>();
    an.kind = kind == "spurious_anomaly" ? EventKind::SpuriousAnomaly
                                         : EventKind::CollectiveAnomaly;
    s.anomalies.push_back(an);
  }
  return s;
}

}  // namespace bocd
