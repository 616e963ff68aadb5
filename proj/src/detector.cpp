#include "bocd/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace bocd {

namespace {

class PhaseTimer {
 public:
  explicit PhaseTimer(double& sink)
      : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           start_)
                 .count();
  }

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void DetectorConfig::validate() const {
  obs.validate();
  hp.validate();
  if (engine == EngineKind::Bocd &&
      (endpoint_mode == EndpointMode::Joint || joint_anomaly_posterior)) {
    throw std::invalid_argument(
        "joint endpoint estimation is only available on the linear engine");
  }
}

EventKind classify_anomaly(std::int64_t interval_start,
                           std::int64_t interval_end,
                           std::int64_t change_estimate, int delta_t) {
  std::int64_t dist = 0;
  if (change_estimate < interval_start) {
    dist = interval_start - change_estimate;
  } else if (change_estimate > interval_end) {
    dist = change_estimate - interval_end;
  }
  return dist > delta_t ? EventKind::CollectiveAnomaly
                        : EventKind::SpuriousAnomaly;
}

Detector::Detector(DetectorConfig cfg)
    : cfg_(cfg), cache_(cfg.obs, cfg.exec) {
  cfg_.validate();
  if (cfg_.engine == EngineKind::Bocd) {
    state_ = BocdState{};
  } else {
    BocdArState st;
    st.joint = cfg_.needs_pair_table();
    state_ = st;
  }
}

int Detector::effective_time() const {
  return std::visit([](const auto& st) { return st.t; }, state_);
}

int Detector::n_c() const {
  return std::visit([](const auto& st) { return st.n_c(); }, state_);
}

int Detector::n_a() const {
  return std::min({effective_time() - 1, cfg_.hp.u_a, n_c()});
}

const BocdState* Detector::bocd_state() const {
  return std::get_if<BocdState>(&state_);
}

const BocdArState* Detector::ar_state() const {
  return std::get_if<BocdArState>(&state_);
}

const Detector::Obs& Detector::at_eff(int eff_index) const {
  const int pos = eff_index - trimmed_ - 1;
  if (pos < 0 || pos >= static_cast<int>(obs_.size())) {
    throw std::logic_error("effective index outside the retained window");
  }
  return obs_[pos];
}

std::int64_t Detector::original_time(int eff_index) const {
  return at_eff(eff_index).time;
}

std::int64_t Detector::change_location(int eff_index) const {
  // A change is dated one past the previous retained observation, which
  // collapses removed transition segments onto the underlying change time.
  if (eff_index <= 1) return at_eff(1).time;
  return at_eff(eff_index - 1).time + 1;
}

RunLengthPosterior Detector::run_length() const {
  if (const auto* b = std::get_if<BocdState>(&state_)) {
    return run_length_posterior(*b);
  }
  return ar_run_length_posterior(std::get<BocdArState>(state_));
}

ChangePointEstimate Detector::change_estimate() const {
  if (const auto* b = std::get_if<BocdState>(&state_)) {
    return map_change_point(*b, cfg_.hp.delta);
  }
  const auto& st = std::get<BocdArState>(state_);
  const auto rl = ar_run_length_posterior(st);
  return {rl.map_index,
          ar_change_window_posterior(st, rl.map_index, cfg_.hp.delta)};
}

std::optional<double> Detector::anomaly_probability(int r_star,
                                                    int n_anom) const {
  if (const auto* b = std::get_if<BocdState>(&state_)) {
    return anomaly_posterior(*b, cfg_.hp, r_star, n_anom);
  }
  const auto& st = std::get<BocdArState>(state_);
  return cfg_.joint_anomaly_posterior
             ? ar_anomaly_posterior_joint(st, cfg_.hp, r_star, n_anom)
             : ar_anomaly_posterior_fast(st, cfg_.hp, r_star, n_anom);
}

std::optional<AnomalyEndpoints> Detector::locate_anomaly(int r_star,
                                                         int n_anom) const {
  if (const auto* b = std::get_if<BocdState>(&state_)) {
    return anomaly_endpoints_sequential(*b, cfg_.hp, r_star);
  }
  return ar_anomaly_endpoints(std::get<BocdArState>(state_), cfg_.hp, r_star,
                              n_anom, cfg_.endpoint_mode);
}

void Detector::step_engine(const Obs& obs, bool timed) {
  {
    std::optional<PhaseTimer> timer;
    if (timed) timer.emplace(times_.likelihoods);
    cache_.advance(obs.y, obs.x);
  }
  std::optional<PhaseTimer> timer;
  if (timed) timer.emplace(times_.recursion);
  if (auto* b = std::get_if<BocdState>(&state_)) {
    bocd_step(*b, cache_, cfg_.hp, cfg_.exec);
  } else {
    ar_step(std::get<BocdArState>(state_), cache_, cfg_.hp, cfg_.exec);
  }
  cache_.truncate(n_c() + 2);
  checkpoints_.push_back({effective_time(), state_, cache_});
  const int horizon = cfg_.hp.u_a + cfg_.hp.delta_t + 2;
  while (static_cast<int>(checkpoints_.size()) > horizon) {
    checkpoints_.pop_front();
  }
}

EventKind Detector::classify_interval(std::int64_t start, std::int64_t end,
                                      double* near_mass_out) const {
  const auto rl = run_length();
  const std::int64_t change_est =
      change_location(effective_time() - rl.map_index);
  double near_mass = 0.0;
  const int t = effective_time();
  for (int r = 0; r < static_cast<int>(rl.probs.size()); ++r) {
    const int eff = t - r;
    if (eff <= trimmed_ + 1) break;
    const std::int64_t loc = change_location(eff);
    if (loc < start - cfg_.hp.delta_t) break;  // older cells only
    if (loc <= end + cfg_.hp.delta_t + 1) near_mass += rl.probs[r];
  }
  if (near_mass_out) *near_mass_out = near_mass;
  if (near_mass > cfg_.hp.lambda_c) return EventKind::SpuriousAnomaly;
  return classify_anomaly(start, end, change_est, cfg_.hp.delta_t);
}

std::vector<DetectionEvent> Detector::process(std::int64_t time, double y,
                                              std::span<const double> x) {
  if (time <= last_time_) {
    throw std::invalid_argument(
        "observations must arrive in strictly increasing time");
  }
  last_time_ = time;
  obs_.push_back({time, y, {x.begin(), x.end()}});
  step_engine(obs_.back());

  std::vector<DetectionEvent> events;
  {
    // Settle classifications deferred from the previous step; one extra
    // observation separates transitional segments from clean anomalies.
    PhaseTimer timer(times_.anomaly_loop);
    for (const auto& p : pending_) {
      const EventKind kind = classify_interval(p.start, p.end);
      events.push_back({kind, p.start, p.end, p.posterior, time});
      removed_.push_back({p.start, p.end, kind});
    }
    pending_.clear();
  }

  auto loop_events = anomaly_loop(time);
  events.insert(events.end(), loop_events.begin(), loop_events.end());
  {
    PhaseTimer timer(times_.change_posterior);
    if (auto ev = confirm_change(time)) events.push_back(*ev);
  }
  trim_history();
  return events;
}

std::vector<DetectionEvent> Detector::anomaly_loop(std::int64_t now) {
  // Replay after a removal is not charged to the anomaly-detection phase;
  // the timer is paused around remove_segment.
  auto mark = std::chrono::steady_clock::now();
  auto charge = [&] {
    const auto stop = std::chrono::steady_clock::now();
    times_.anomaly_loop += std::chrono::duration<double>(stop - mark).count();
    mark = stop;
  };

  std::vector<DetectionEvent> events;
  for (int iter = 0;; ++iter) {
    if (iter > cfg_.hp.u_a) {
      throw std::logic_error("anomaly loop exceeded its iteration budget");
    }
    const auto rl = run_length();
    const int r_star = rl.map_index;
    const int n_anom = n_a();
    if (r_star > n_anom) break;
    if (r_star < cfg_.hp.anomaly_confirm_lag) break;
    const auto prob = anomaly_probability(r_star, n_anom);
    if (!prob || *prob <= cfg_.hp.lambda_a) break;
    const auto ep = locate_anomaly(r_star, n_anom);
    if (!ep) break;

    const int t = effective_time();
    const int eff_end = t - ep->end_age - 1;
    const int eff_start = eff_end - ep->duration_offset;
    if (eff_start < 1 || eff_end < eff_start) break;
    const std::int64_t orig_start = original_time(eff_start);
    const std::int64_t orig_end = original_time(eff_end);

    if (cfg_.retain_collective) {
      const bool already = std::any_of(
          alerted_anomalies_.begin(), alerted_anomalies_.end(),
          [&](const auto& iv) {
            return orig_start <= iv.second && iv.first <= orig_end;
          });
      if (already) break;
    }

    charge();
    auto undo = remove_segment(eff_start, eff_end);
    mark = std::chrono::steady_clock::now();

    // Classify against the re-estimated most recent change. Right after a
    // removal there is often a single post-gap observation, so a would-be
    // collective verdict with nontrivial change mass next to the interval is
    // held for one more observation instead of being emitted.
    double near_mass = 0.0;
    const EventKind kind = classify_interval(orig_start, orig_end, &near_mass);
    if (kind == EventKind::CollectiveAnomaly && !cfg_.retain_collective &&
        near_mass > cfg_.classify_defer_floor) {
      pending_.push_back({orig_start, orig_end, *prob});
      continue;
    }

    events.push_back({kind, orig_start, orig_end, *prob, now});
    if (kind == EventKind::CollectiveAnomaly && cfg_.retain_collective) {
      undo_removal(std::move(undo));
      alerted_anomalies_.emplace_back(orig_start, orig_end);
      break;
    }
    removed_.push_back({orig_start, orig_end, kind});
  }
  charge();
  return events;
}

std::optional<DetectionEvent> Detector::confirm_change(std::int64_t now) {
  const auto est = change_estimate();
  // The oldest retained cell means "no change inside the search range"
  // (ultimately the conventional change at time 1); it is never alertable.
  if (est.map_age >= n_c()) return std::nullopt;
  if (!(est.windowed_posterior > cfg_.hp.lambda_c)) return std::nullopt;
  if (est.map_age < cfg_.hp.confirm_lag) return std::nullopt;
  const std::int64_t loc = change_location(effective_time() - est.map_age);
  // Re-detections within the localization tolerance or the anomaly duration
  // scale refine an already-alerted change rather than finding a new one.
  const std::int64_t dedup =
      std::max<std::int64_t>(cfg_.hp.delta, cfg_.hp.delta_t);
  for (std::int64_t prior : alerted_changes_) {
    if (std::llabs(loc - prior) <= dedup) return std::nullopt;
  }
  alerted_changes_.push_back(loc);
  return DetectionEvent{EventKind::ChangePoint, loc, loc,
                        est.windowed_posterior, now};
}

Detector::RemovalUndo Detector::remove_segment(int eff_start, int eff_end) {
  RemovalUndo undo;
  if (eff_start > eff_end) return undo;  // empty interval
  const int t = effective_time();
  if (eff_start < 1 || eff_end > t) {
    throw std::invalid_argument("removal interval outside the series");
  }

  const int t0 = eff_start - 1;
  std::optional<Snapshot> base;
  if (t0 == 0) {
    if (trimmed_ == 0) {
      Snapshot fresh{0, EngineState{}, SegmentCache(cfg_.obs, cfg_.exec)};
      if (cfg_.engine == EngineKind::BocdAr) {
        BocdArState st;
        st.joint = cfg_.needs_pair_table();
        fresh.state = st;
      }
      base = std::move(fresh);
    }
  } else {
    for (const auto& snap : checkpoints_) {
      if (snap.t == t0) {
        base = snap;
        break;
      }
    }
  }
  if (!base) {
    throw std::runtime_error(
        "removal interval is older than the checkpoint horizon");
  }

  undo.noop = false;
  undo.at_eff = eff_start;
  undo.state = state_;
  undo.cache = cache_;

  // Splice the interval out of the retained series.
  const auto first = obs_.begin() + (eff_start - trimmed_ - 1);
  const auto last = obs_.begin() + (eff_end - trimmed_);
  undo.removed_obs.assign(first, last);
  obs_.erase(first, last);

  // Rewind to the checkpoint and drop the snapshots it invalidates.
  while (!checkpoints_.empty() && checkpoints_.back().t > t0) {
    undo.dropped_checkpoints.push_back(std::move(checkpoints_.back()));
    checkpoints_.pop_back();
  }
  std::reverse(undo.dropped_checkpoints.begin(),
               undo.dropped_checkpoints.end());
  state_ = std::move(base->state);
  cache_ = std::move(base->cache);

  // Replay the retained observations that followed the interval. Replay is
  // excluded from the per-phase timing.
  const int new_total = trimmed_ + static_cast<int>(obs_.size());
  for (int i = eff_start; i <= new_total; ++i) {
    step_engine(at_eff(i), /*timed=*/false);
  }
  return undo;
}

void Detector::undo_removal(RemovalUndo&& undo) {
  if (undo.noop) return;
  state_ = std::move(undo.state);
  cache_ = std::move(*undo.cache);
  obs_.insert(obs_.begin() + (undo.at_eff - trimmed_ - 1),
              undo.removed_obs.begin(), undo.removed_obs.end());
  while (!checkpoints_.empty() && checkpoints_.back().t >= undo.at_eff) {
    checkpoints_.pop_back();
  }
  for (auto& snap : undo.dropped_checkpoints) {
    checkpoints_.push_back(std::move(snap));
  }
}

void Detector::trim_history() {
  const int keep =
      std::max(cfg_.hp.u_c + 2, cfg_.hp.u_a + cfg_.hp.delta_t + 4);
  while (static_cast<int>(obs_.size()) > keep) {
    obs_.pop_front();
    ++trimmed_;
  }
}

SearchRanges Detector::search_ranges() const {
  SearchRanges out;
  out.n_a = n_a();
  out.n_c = n_c();
  const int t = effective_time();
  for (int i = t - out.n_c; i <= t; ++i) {
    out.timestamps.push_back(original_time(i));
  }
  out.removed = removed_;
  return out;
}

}  // namespace bocd
