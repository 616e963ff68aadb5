#include "bocd/segment_cache.hpp"

namespace bocd {

SegmentCache::SegmentCache(ObsModelConfig cfg, Exec exec)
    : cfg_(cfg), exec_(exec) {
  cfg_.validate();
}

void SegmentCache::advance(double y, std::span<const double> x) {
  prev_log_l_ = log_l_;
  stats_.insert(stats_.begin(), SuffStats(cfg_));
  log_l_.insert(log_l_.begin(), 0.0);
  update_suffixes(y, x);
}

void SegmentCache::update_suffixes(double y, std::span<const double> x) {
  const int n = static_cast<int>(stats_.size());
  if (exec_ == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      stats_[i].add(y, x);
      log_l_[i] = stats_[i].log_marginal(cfg_);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      stats_[i].add(y, x);
      log_l_[i] = stats_[i].log_marginal(cfg_);
    }
  }
}

void SegmentCache::truncate(int max_len) {
  if (static_cast<int>(stats_.size()) > max_len) {
    stats_.resize(max_len);
    log_l_.resize(max_len);
  }
  if (static_cast<int>(prev_log_l_.size()) > max_len) {
    prev_log_l_.resize(max_len);
  }
}

}  // namespace bocd
