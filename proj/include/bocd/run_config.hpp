#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bocd/detector.hpp"

namespace bocd {

struct NormalizeBounds {
  double lo = 0.0;
  double hi = 1.0;
};

/// Full configuration of a detection run. Serializes to JSON; loading then
/// serializing is idempotent.
struct RunConfig {
  DetectorConfig detector;
  /// Streaming min-max normalization needs fixed, user-supplied bounds.
  std::optional<NormalizeBounds> value_bounds;
  std::vector<NormalizeBounds> feature_bounds;
  bool strict = false;  // abort on malformed input rows

  void validate() const;
  /// Writes advisory notes (e.g. q0 above its spurious-alarm bound) without
  /// rejecting the configuration.
  void warn(std::ostream& out) const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

std::string engine_name(EngineKind kind);
std::string event_kind_name(EventKind kind);

}  // namespace bocd
