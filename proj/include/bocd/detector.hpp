#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bocd/bocd_ar_engine.hpp"
#include "bocd/bocd_engine.hpp"
#include "bocd/hyperparams.hpp"
#include "bocd/segment_cache.hpp"

namespace bocd {

enum class EngineKind { Bocd, BocdAr };
enum class EventKind { ChangePoint, CollectiveAnomaly, SpuriousAnomaly };

struct DetectionEvent {
  EventKind kind = EventKind::ChangePoint;
  std::int64_t start = 0;  // original time; start == end for change points
  std::int64_t end = 0;
  double posterior = 0.0;
  std::int64_t alert_time = 0;
};

struct RemovedInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;
  EventKind reason = EventKind::SpuriousAnomaly;
};

/// View of the retained change-point window in original time.
struct SearchRanges {
  std::vector<std::int64_t> timestamps;
  int n_a = 0;
  int n_c = 0;
  std::vector<RemovedInterval> removed;
};

struct DetectorConfig {
  ObsModelConfig obs;
  Hyperparams hp;
  EngineKind engine = EngineKind::BocdAr;
  EndpointMode endpoint_mode = EndpointMode::Sequential;
  bool joint_anomaly_posterior = false;  // linear engine only
  bool retain_collective = false;
  Exec exec = Exec::Serial;
  /// A removed interval that would be labelled collective is held for one
  /// more observation when the posterior still puts at least this much mass
  /// on a change next to it; one extra point settles transitional cases.
  /// Ignored when retain_collective is set (reverting needs the immediate
  /// decision).
  double classify_defer_floor = 0.1;

  bool needs_pair_table() const {
    return engine == EngineKind::BocdAr &&
           (endpoint_mode == EndpointMode::Joint || joint_anomaly_posterior);
  }
  void validate() const;
};

/// Wall time spent per detection phase, in seconds.
struct PhaseTimes {
  double likelihoods = 0.0;
  double recursion = 0.0;
  double anomaly_loop = 0.0;
  double change_posterior = 0.0;
  double total() const {
    return likelihoods + recursion + anomaly_loop + change_posterior;
  }
};

/// Labels a removed interval by its distance to the updated most recent
/// change estimate: collective when farther than delta_t, spurious otherwise.
EventKind classify_anomaly(std::int64_t interval_start,
                           std::int64_t interval_end,
                           std::int64_t change_estimate, int delta_t);

/// One detector per stream. Observations are consumed in strictly increasing
/// original time; detected anomalies are spliced out of the effective series
/// and the engine is replayed from a stored checkpoint.
class Detector {
 public:
  using EngineState = std::variant<BocdState, BocdArState>;

  struct Obs {
    std::int64_t time = 0;
    double y = 0.0;
    std::vector<double> x;
  };

  explicit Detector(DetectorConfig cfg);

  std::vector<DetectionEvent> process(std::int64_t time, double y,
                                      std::span<const double> x = {});

  /// Everything needed to revert one removal.
  struct RemovalUndo;

  /// Splices effective times [eff_start, eff_end] out of the series and
  /// replays the engine from the last checkpoint strictly before the
  /// interval. Empty intervals are no-ops; intervals older than the
  /// checkpoint horizon are a hard error.
  RemovalUndo remove_segment(int eff_start, int eff_end);
  void undo_removal(RemovalUndo&& undo);

  // Introspection.
  int effective_time() const;
  std::int64_t original_time(int eff_index) const;
  const BocdState* bocd_state() const;
  const BocdArState* ar_state() const;
  const SegmentCache& cache() const { return cache_; }
  const DetectorConfig& config() const { return cfg_; }
  SearchRanges search_ranges() const;
  const PhaseTimes& phase_times() const { return times_; }
  RunLengthPosterior run_length() const;
  ChangePointEstimate change_estimate() const;

 private:
  struct Snapshot {
    int t = 0;
    EngineState state;
    SegmentCache cache;
  };

 public:
  struct RemovalUndo {
    bool noop = true;
    int at_eff = 0;
    EngineState state;
    std::optional<SegmentCache> cache;
    std::vector<Obs> removed_obs;
    std::vector<Snapshot> dropped_checkpoints;
  };

 private:
  struct PendingAnomaly {
    std::int64_t start = 0;
    std::int64_t end = 0;
    double posterior = 0.0;
  };

  void step_engine(const Obs& obs, bool timed = true);
  std::vector<DetectionEvent> anomaly_loop(std::int64_t now);
  std::optional<DetectionEvent> confirm_change(std::int64_t now);
  /// Distance-plus-posterior classification of a removed interval against
  /// the current state; fills near_mass with the posterior mass of a change
  /// within delta_t of the interval.
  EventKind classify_interval(std::int64_t start, std::int64_t end,
                              double* near_mass = nullptr) const;
  std::optional<double> anomaly_probability(int r_star, int n_a) const;
  std::optional<AnomalyEndpoints> locate_anomaly(int r_star, int n_a) const;
  int n_a() const;
  int n_c() const;
  std::int64_t change_location(int eff_index) const;
  const Obs& at_eff(int eff_index) const;
  void trim_history();

  DetectorConfig cfg_;
  SegmentCache cache_;
  EngineState state_;
  std::deque<Snapshot> checkpoints_;
  std::deque<Obs> obs_;
  int trimmed_ = 0;  // observations dropped from the front of obs_
  std::int64_t last_time_ = INT64_MIN;
  std::vector<std::int64_t> alerted_changes_;
  std::vector<std::pair<std::int64_t, std::int64_t>> alerted_anomalies_;
  std::vector<RemovedInterval> removed_;
  std::vector<PendingAnomaly> pending_;
  PhaseTimes times_;
};

}  // namespace bocd
