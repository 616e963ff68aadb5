#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "bocd/bocd_engine.hpp"
#include "bocd/hyperparams.hpp"
#include "bocd/segment_cache.hpp"

namespace bocd {

enum class EndpointMode { Sequential, Joint };

/// State of the linear-cost recursion. Anomalies are removed by the detector
/// as they are found, so the run length doubles as the change-point age.
struct BocdArState {
  int t = 0;
  /// end_tab[r]: the most recent change is r steps back and ends an anomaly.
  std::vector<double> end_tab;
  /// cp_tab[r]: the most recent change is r steps back and is a change point
  /// or anomaly start.
  std::vector<double> cp_tab;
  /// pair_tab[r][rp]: the two most recent changes enclose an anomaly ending
  /// r steps back with body offset rp. Maintained only in joint mode.
  std::vector<std::vector<double>> pair_tab;
  bool joint = false;
  /// First delta_t entries of cp_tab at recent times, for the sequential
  /// endpoint estimate.
  std::deque<HeadRow> cp_head_hist;

  int n_c() const { return static_cast<int>(cp_tab.size()) - 1; }
  double pair_cell(int r, int rp) const {
    if (r < 0 || r >= static_cast<int>(pair_tab.size())) return kNegInf;
    const auto& row = pair_tab[r];
    if (rp < 0 || rp >= static_cast<int>(row.size())) return kNegInf;
    return row[rp];
  }
};

/// Advances the recursion by one observation (initializes when t == 0).
void ar_step(BocdArState& state, const SegmentCache& cache,
             const Hyperparams& hp, Exec exec = Exec::Serial);

RunLengthPosterior ar_run_length_posterior(const BocdArState& state);

/// O(delta_t) anomaly probability: windowed anomaly-end mass over windowed
/// total mass. Nullopt when r_star lies outside the anomaly search range.
std::optional<double> ar_anomaly_posterior_fast(const BocdArState& state,
                                                const Hyperparams& hp,
                                                int r_star, int n_a);

/// Joint-table anomaly probability, which additionally constrains the
/// anomaly's start time; never exceeds the fast variant. Requires joint mode.
std::optional<double> ar_anomaly_posterior_joint(const BocdArState& state,
                                                 const Hyperparams& hp,
                                                 int r_star, int n_a);

std::optional<AnomalyEndpoints> ar_anomaly_endpoints(const BocdArState& state,
                                                     const Hyperparams& hp,
                                                     int r_star, int n_a,
                                                     EndpointMode mode);

/// Posterior mass of the run length within +-delta of r_star.
double ar_change_window_posterior(const BocdArState& state, int r_star,
                                  int delta);

}  // namespace bocd
