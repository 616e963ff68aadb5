#pragma once

#include <cstdint>
#include <vector>

#include "bocd/detector.hpp"
#include "bocd/hyperparams.hpp"
#include "bocd/obs_model.hpp"

namespace bocd {

struct PlantedAnomaly {
  std::int64_t start = 0;
  std::int64_t end = 0;
  EventKind kind = EventKind::CollectiveAnomaly;
  double mean_shift = 0.0;
};

struct SimSeries {
  std::vector<double> values;  // values[i] is the observation at time i + 1
  std::vector<std::int64_t> change_points;
  std::vector<PlantedAnomaly> anomalies;
  std::uint64_t seed = 0;
};

/// Benchmark-series layout: mean-shift segments with one planted anomaly per
/// block, plus a transitional (spurious) segment glued to one change point.
struct PaperSimConfig {
  int length = 1000;
  std::vector<std::int64_t> change_points{75, 175, 300, 450, 625, 825};
  std::vector<double> mean_pool{2, 4, 6, 8};
  double noise_sd = 0.5;
  int anomaly_every = 100;
  int anomaly_offset = 52;
  std::vector<int> anomaly_durations{1, 4};
  std::vector<double> anomaly_shifts{-4, -2, 2, 4};
  /// Minimum gap between a planted collective anomaly and any change point.
  /// Closer placements would be transitional segments by definition, and
  /// placements inside the post-change confirmation window are not cleanly
  /// attributable to either kind.
  int change_margin = 8;
  std::int64_t spurious_at = 300;  // < 0 disables the transitional segment
  int spurious_duration = 4;
};

SimSeries generate_paper_series(const PaperSimConfig& cfg, std::uint64_t seed);

/// Latent trace of a draw from the generative process.
struct GenerativeTrace {
  std::vector<int> change;       // c^t
  std::vector<int> anomaly_end;  // a^t
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Samples a series from the prior: changes arrive with probability p0, or q0
/// while a start-type change is within delta_t; parameters revert at anomaly
/// ends.
SimSeries sample_generative(const Hyperparams& hp, const ObsModelConfig& cfg,
                            int length, std::uint64_t seed,
                            GenerativeTrace* trace = nullptr);

}  // namespace bocd
