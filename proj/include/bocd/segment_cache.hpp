#pragma once

#include <span>
#include <vector>

#include "bocd/math_util.hpp"
#include "bocd/obs_model.hpp"

namespace bocd {

/// Rolling store of segment marginal likelihoods over the change-point search
/// range. After `advance` has consumed y^t, index r holds the statistics and
/// log marginal of the segment y^{(t-r):t}; the previous step's marginals are
/// kept so posterior predictives are a subtraction. Updating the suffixes is
/// the data-parallel inner loop of every step.
class SegmentCache {
 public:
  SegmentCache(ObsModelConfig cfg, Exec exec = Exec::Serial);

  void advance(double y, std::span<const double> x = {});

  /// Drop suffixes older than `max_len` entries (ages >= max_len).
  void truncate(int max_len);

  int len() const { return static_cast<int>(log_l_.size()); }
  int prev_len() const { return static_cast<int>(prev_log_l_.size()); }

  /// log L(y^{(t-r):t})
  double log_marginal_age(int r) const { return log_l_[r]; }

  /// log L(y^{(t-1-r):(t-1)}) from before the latest advance.
  double prev_log_marginal_age(int r) const { return prev_log_l_[r]; }

  /// log P(y^t | y^{(t-r):(t-1)}); r = 0 gives log L(y^t).
  double log_predictive_age(int r) const {
    return r == 0 ? log_l_[0] : log_l_[r] - prev_log_l_[r - 1];
  }

  const ObsModelConfig& config() const { return cfg_; }
  Exec exec() const { return exec_; }

 private:
  void update_suffixes(double y, std::span<const double> x);

  ObsModelConfig cfg_;
  Exec exec_;
  std::vector<SuffStats> stats_;
  std::vector<double> log_l_;
  std::vector<double> prev_log_l_;
};

}  // namespace bocd
