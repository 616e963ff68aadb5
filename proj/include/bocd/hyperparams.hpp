#pragma once

#include <optional>

namespace bocd {

/// Detection tunables shared by both engines and the detector.
struct Hyperparams {
  double p0 = 0.1;    // prior probability of a change of unknown type
  double q0 = 0.2;    // prior probability that an open anomaly ends now
  int delta_t = 4;    // maximum collective-anomaly duration
  int u_a = 27;       // anomaly search range length is at most u_a + 1
  int u_c = 299;      // change-point search range length is at most u_c + 1
  double lambda_a = 0.5;  // anomaly alert threshold
  double lambda_c = 0.5;  // change-point alert threshold
  int delta = 0;          // localization tolerance for windowed posteriors
  int confirm_lag = 5;    // post-change observations required before alerting
  int anomaly_confirm_lag = 0;  // same gate for anomaly detection
  std::optional<double> trunc_mass;  // posterior-tail truncation threshold
  int min_range_len = 8;  // floor on the retained range when truncating

  /// Throws std::invalid_argument when a constraint is violated.
  void validate() const;
};

}  // namespace bocd
