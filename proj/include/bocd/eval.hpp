#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bocd/detector.hpp"
#include "bocd/sim_gen.hpp"

namespace bocd {

/// Matching conventions. Change points match by location distance; anomalies
/// match when the detected and planted intervals overlap. The exact
/// conventions are configurable because published summaries rarely pin them.
struct MatchOptions {
  std::int64_t cp_tol = 0;
  bool anomaly_by_overlap = true;
  std::int64_t anomaly_midpoint_tol = 4;  // used when overlap matching is off
};

struct EventCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  /// Detections of this kind that land on a truth of the other kind.
  long confusions = 0;
  double delay_sum = 0.0;
  double excess_delay_sum = 0.0;
};

struct MatchResult {
  EventCounts change_points;
  EventCounts anomalies;
};

/// Greedy one-to-one matching, earliest alert first. Delays are measured from
/// the change time for change points and from the first post-anomaly
/// observation for anomalies; excess delay subtracts the confirmation lag.
MatchResult match_events(const SimSeries& truth,
                         std::span<const DetectionEvent> events,
                         const MatchOptions& opts, int change_confirm_lag = 0,
                         int anomaly_confirm_lag = 0);

struct KindMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double false_positive_rate = 0.0;
  double mean_delay = 0.0;
  double mean_excess_delay = 0.0;
  long tp = 0, fp = 0, fn = 0, confusions = 0;
  bool precision_defined = false;
};

struct MetricsReport {
  KindMetrics change_points;
  KindMetrics anomalies;
  int n_series = 0;
};

MetricsReport aggregate_metrics(std::span<const MatchResult> results);

/// Classical run-length recursion with a constant change hazard; the
/// change-point-only baseline.
struct BocpdState {
  int t = 0;
  std::vector<double> log_joint;
  int n_c() const { return static_cast<int>(log_joint.size()) - 1; }
};

void bocpd_step(BocpdState& state, const SegmentCache& cache, double p0,
                int u_c);
RunLengthPosterior bocpd_run_length_posterior(const BocpdState& state);

/// BOCPD wrapped in the same confirmation, windowing and deduplication
/// conventions as the main detector.
class BocpdDetector {
 public:
  BocpdDetector(ObsModelConfig obs, Hyperparams hp);
  std::vector<DetectionEvent> process(std::int64_t time, double y);
  const BocpdState& state() const { return state_; }
  RunLengthPosterior run_length() const {
    return bocpd_run_length_posterior(state_);
  }

 private:
  ObsModelConfig obs_;
  Hyperparams hp_;
  SegmentCache cache_;
  BocpdState state_;
  std::deque<std::int64_t> times_;
  int trimmed_ = 0;
  std::vector<std::int64_t> alerted_;
};

enum class BenchMethod { Bocd, BocdAr, Bocpd };

struct BenchmarkConfig {
  int n_series = 100;
  std::uint64_t seed0 = 1;
  PaperSimConfig sim;
  DetectorConfig det;
  BenchMethod method = BenchMethod::BocdAr;
  MatchOptions match{/*cp_tol=*/4};
  bool parallel = true;
};

struct BenchmarkResult {
  MetricsReport report;
  PhaseTimes phases;             // summed across series
  double detect_seconds = 0.0;   // wall time inside process(), summed
};

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

}  // namespace bocd
