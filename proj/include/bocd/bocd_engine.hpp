#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "bocd/hyperparams.hpp"
#include "bocd/math_util.hpp"
#include "bocd/segment_cache.hpp"

namespace bocd {

/// R(t,d): largest admissible run length r < d when the most recent change
/// point is d steps back. Negative means no anomaly-end state is admissible.
inline int max_anomaly_run(int t, int d, int delta_t) {
  return d == t - 1 ? d - 1 : d - delta_t - 1;
}

/// A(t,d): largest admissible previous run length when an anomaly ends now,
/// i.e. the largest anomaly-body offset.
inline int max_body_offset(int t, int d, int delta_t) {
  return std::min(delta_t - 1, max_anomaly_run(t, d, delta_t) - 1);
}

struct RunLengthPosterior {
  std::vector<double> probs;
  int map_index = 0;
};

struct AnomalyEndpoints {
  int end_age = 0;          // r1: the anomaly ended at time t - end_age - 1... see below
  int duration_offset = 0;  // r2: the anomaly spans duration_offset + 1 points
};
// The located anomaly occupies effective times
// [(t - end_age - 1) - duration_offset, t - end_age - 1].

struct ChangePointEstimate {
  int map_age = 0;  // the change point is map_age steps back
  double windowed_posterior = 0.0;
};

struct HeadRow {
  int time = 0;
  std::vector<double> values;
};

/// State of the exact recursion. All tables are log-domain joint likelihoods
/// of y^{1:t} with the indicated conditioning event; structurally impossible
/// cells are absent from the ragged rows and read as -inf.
struct BocdState {
  int t = 0;
  /// anom[d][r]: most recent change point d steps back, most recent anomaly
  /// ended r steps back (r < R(t,d)).
  std::vector<std::vector<double>> anom;
  /// clean[d]: most recent change point d steps back, no anomaly since.
  std::vector<double> clean;
  /// total[d] = logsumexp(anom[d][*], clean[d]): most recent change point d
  /// steps back regardless of anomalies.
  std::vector<double> total;
  /// anom_marg[r] = logsumexp over d of anom[d][r], refreshed each step.
  std::vector<double> anom_marg;
  /// total vectors of the last delta_t steps, newest first (entry k is the
  /// table of time t-1-k); consumed by the anomaly-end birth sum.
  std::deque<std::vector<double>> total_hist;
  /// First delta_t entries of clean at recent times, for the sequential
  /// endpoint estimate.
  std::deque<HeadRow> clean_head_hist;

  int n_c() const { return static_cast<int>(clean.size()) - 1; }
  /// Reads a table cell, -inf for absent cells.
  double anom_cell(int d, int r) const {
    if (d < 0 || d >= static_cast<int>(anom.size())) return kNegInf;
    const auto& row = anom[d];
    if (r < 0 || r >= static_cast<int>(row.size())) return kNegInf;
    return row[r];
  }
};

/// Advances the recursion by one observation; the cache must already hold the
/// new observation's marginals. Handles initialization when state.t == 0.
void bocd_step(BocdState& state, const SegmentCache& cache,
               const Hyperparams& hp, Exec exec = Exec::Serial);

/// Posterior of the run length (time since the most recent change of any
/// kind), with its MAP index; smallest index wins ties.
RunLengthPosterior run_length_posterior(const BocdState& state);

/// Windowed probability that the most recent change ends a collective
/// anomaly, given the run length lies within delta_t of its MAP. Nullopt when
/// r_star is outside the anomaly search range.
std::optional<double> anomaly_posterior(const BocdState& state,
                                        const Hyperparams& hp, int r_star,
                                        int n_a);

/// Sequential MAP estimate of the anomaly end and duration.
std::optional<AnomalyEndpoints> anomaly_endpoints_sequential(
    const BocdState& state, const Hyperparams& hp, int r_star);

/// MAP change-point age and the posterior mass within +-delta of it.
ChangePointEstimate map_change_point(const BocdState& state, int delta);

}  // namespace bocd
