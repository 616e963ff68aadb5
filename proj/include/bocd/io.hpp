#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bocd/detector.hpp"
#include "bocd/sim_gen.hpp"

namespace bocd {

struct CsvRow {
  std::int64_t time = 0;
  double value = 0.0;
  std::vector<double> features;
};

/// Parses one CSV data row: time (integer or ISO-8601 timestamp), value and
/// optional feature columns. Throws std::invalid_argument on malformed rows.
CsvRow parse_csv_row(const std::string& line, int feature_dim);

/// True for a header row (first field is not a time).
bool looks_like_header(const std::string& line);

/// ISO-8601 "YYYY-MM-DDTHH:MM:SS" to seconds since the epoch (UTC).
std::int64_t parse_iso_time(const std::string& text);

/// Versioned single-line event record.
nlohmann::json event_to_json(const DetectionEvent& ev,
                             const std::string& engine);

nlohmann::json ground_truth_to_json(const SimSeries& series);
SimSeries ground_truth_from_json(const nlohmann::json& j);

}  // namespace bocd
