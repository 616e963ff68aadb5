#include "bocd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bocd {

namespace {

std::vector<DetectionEvent> sorted_by_alert(
    std::span<const DetectionEvent> events, EventKind kind) {
  std::vector<DetectionEvent> out;
  for (const auto& ev : events) {
    if (ev.kind == kind) out.push_back(ev);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) {
                     return a.alert_time < b.alert_time;
                   });
  return out;
}

std::int64_t interval_distance(std::int64_t lo, std::int64_t hi,
                               std::int64_t x) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0;
}

}  // namespace

MatchResult match_events(const SimSeries& truth,
                         std::span<const DetectionEvent> events,
                         const MatchOptions& opts, int change_confirm_lag,
                         int anomaly_confirm_lag) {
  MatchResult out;

  // Change points.
  {
    const auto dets = sorted_by_alert(events, EventKind::ChangePoint);
    std::vector<bool> used(truth.change_points.size(), false);
    std::vector<const DetectionEvent*> unmatched;
    for (const auto& ev : dets) {
      int best = -1;
      std::int64_t best_dist = opts.cp_tol + 1;
      for (std::size_t i = 0; i < truth.change_points.size(); ++i) {
        if (used[i]) continue;
        const std::int64_t dist = std::abs(ev.start - truth.change_points[i]);
        if (dist < best_dist) {
          best_dist = dist;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) {
        used[best] = true;
        ++out.change_points.tp;
        const double delay =
            static_cast<double>(ev.alert_time - truth.change_points[best]);
        out.change_points.delay_sum += delay;
        out.change_points.excess_delay_sum +=
            std::max(0.0, delay - change_confirm_lag);
      } else {
        ++out.change_points.fp;
        unmatched.push_back(&ev);
      }
    }
    out.change_points.fn = static_cast<long>(
        std::count(used.begin(), used.end(), false));

    // Unmatched change detections that land on a planted anomaly are type
    // confusions.
    std::vector<bool> an_used(truth.anomalies.size(), false);
    for (const auto* ev : unmatched) {
      for (std::size_t i = 0; i < truth.anomalies.size(); ++i) {
        const auto& an = truth.anomalies[i];
        if (an.kind != EventKind::CollectiveAnomaly || an_used[i]) continue;
        if (interval_distance(an.start, an.end, ev->start) <= opts.cp_tol) {
          an_used[i] = true;
          ++out.change_points.confusions;
          break;
        }
      }
    }
  }

  // Collective anomalies.
  {
    const auto dets = sorted_by_alert(events, EventKind::CollectiveAnomaly);
    std::vector<const PlantedAnomaly*> truths;
    for (const auto& an : truth.anomalies) {
      if (an.kind == EventKind::CollectiveAnomaly) truths.push_back(&an);
    }
    std::vector<bool> used(truths.size(), false);
    std::vector<const DetectionEvent*> unmatched;
    for (const auto& ev : dets) {
      int best = -1;
      for (std::size_t i = 0; i < truths.size(); ++i) {
        if (used[i]) continue;
        const bool overlap =
            ev.start <= truths[i]->end && truths[i]->start <= ev.end;
        const bool near_mid =
            std::abs((ev.start + ev.end) / 2 -
                     (truths[i]->start + truths[i]->end) / 2) <=
            opts.anomaly_midpoint_tol;
        if ((opts.anomaly_by_overlap && overlap) || near_mid) {
          best = static_cast<int>(i);
          break;
        }
      }
      if (best >= 0) {
        used[best] = true;
        ++out.anomalies.tp;
        const double delay =
            static_cast<double>(ev.alert_time - (truths[best]->end + 1));
        out.anomalies.delay_sum += delay;
        out.anomalies.excess_delay_sum +=
            std::max(0.0, delay - anomaly_confirm_lag);
      } else {
        ++out.anomalies.fp;
        unmatched.push_back(&ev);
      }
    }
    out.anomalies.fn =
        static_cast<long>(std::count(used.begin(), used.end(), false));

    std::vector<bool> cp_used(truth.change_points.size(), false);
    for (const auto* ev : unmatched) {
      for (std::size_t i = 0; i < truth.change_points.size(); ++i) {
        if (cp_used[i]) continue;
        if (interval_distance(ev->start, ev->end, truth.change_points[i]) <=
            opts.cp_tol) {
          cp_used[i] = true;
          ++out.anomalies.confusions;
          break;
        }
      }
    }
  }
  return out;
}

namespace {

KindMetrics finish(const EventCounts& acc_self, const EventCounts& acc_other) {
  KindMetrics m;
  m.tp = acc_self.tp;
  m.fp = acc_self.fp;
  m.fn = acc_self.fn;
  m.confusions = acc_self.confusions;
  m.precision_defined = acc_self.tp + acc_self.fp > 0;
  m.precision = m.precision_defined
                    ? static_cast<double>(acc_self.tp) /
                          static_cast<double>(acc_self.tp + acc_self.fp)
                    : 0.0;
  m.recall = acc_self.tp + acc_self.fn > 0
                 ? static_cast<double>(acc_self.tp) /
                       static_cast<double>(acc_self.tp + acc_self.fn)
                 : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  const long other_truths = acc_other.tp + acc_other.fn;
  m.false_positive_rate =
      other_truths > 0
          ? static_cast<double>(acc_self.confusions) /
                static_cast<double>(other_truths)
          : 0.0;
  m.mean_delay = acc_self.tp > 0 ? acc_self.delay_sum / acc_self.tp : 0.0;
  m.mean_excess_delay =
      acc_self.tp > 0 ? acc_self.excess_delay_sum / acc_self.tp : 0.0;
  return m;
}

}  // namespace

MetricsReport aggregate_metrics(std::span<const MatchResult> results) {
  EventCounts cp, an;
  auto fold = [](EventCounts& acc, const EventCounts& x) {
    acc.tp += x.tp;
    acc.fp += x.fp;
    acc.fn += x.fn;
    acc.confusions += x.confusions;
    acc.delay_sum += x.delay_sum;
    acc.excess_delay_sum += x.excess_delay_sum;
  };
  for (const auto& r : results) {
    fold(cp, r.change_points);
    fold(an, r.anomalies);
  }
  MetricsReport rep;
  rep.change_points = finish(cp, an);
  rep.anomalies = finish(an, cp);
  rep.n_series = static_cast<int>(results.size());
  return rep;
}

void bocpd_step(BocpdState& st, const SegmentCache& cache, double p0,
                int u_c) {
  const double log_p0 = std::log(p0);
  const double log_1p0 = std::log1p(-p0);
  if (st.t == 0) {
    st.t = 1;
    st.log_joint = {cache.log_marginal_age(0)};
    return;
  }
  const int t = st.t + 1;
  const int n_prev = st.n_c();
  const int n_new = std::min(n_prev + 1, u_c);
  std::vector<double> next(n_new + 1);
  next[0] = log_sum_exp(st.log_joint) + cache.log_marginal_age(0) + log_p0;
  for (int r = 1; r <= n_new; ++r) {
    next[r] = st.log_joint[r - 1] + cache.log_predictive_age(r) + log_1p0;
  }
  st.t = t;
  st.log_joint = std::move(next);
}

RunLengthPosterior bocpd_run_length_posterior(const BocpdState& st) {
  RunLengthPosterior out;
  const double norm = log_sum_exp(st.log_joint);
  out.probs.resize(st.log_joint.size());
  for (std::size_t r = 0; r < st.log_joint.size(); ++r) {
    out.probs[r] = std::exp(st.log_joint[r] - norm);
  }
  out.map_index = arg_max(st.log_joint);
  return out;
}

BocpdDetector::BocpdDetector(ObsModelConfig obs, Hyperparams hp)
    : obs_(obs), hp_(hp), cache_(obs) {
  hp_.validate();
}

std::vector<DetectionEvent> BocpdDetector::process(std::int64_t time,
                                                   double y) {
  cache_.advance(y);
  bocpd_step(state_, cache_, hp_.p0, hp_.u_c);
  cache_.truncate(state_.n_c() + 2);
  times_.push_back(time);
  while (static_cast<int>(times_.size()) > hp_.u_c + 3) {
    times_.pop_front();
    ++trimmed_;
  }

  std::vector<DetectionEvent> events;
  const auto rl = bocpd_run_length_posterior(state_);
  const int n = state_.n_c();
  double win = kNegInf;
  std::vector<double> log_mass = state_.log_joint;
  const double norm = log_sum_exp(log_mass);
  for (int r = std::max(0, rl.map_index - hp_.delta);
       r <= std::min(n, rl.map_index + hp_.delta); ++r) {
    win = log_add(win, log_mass[r]);
  }
  const double windowed = std::exp(win - norm);
  if (rl.map_index < n && windowed > hp_.lambda_c &&
      rl.map_index >= hp_.confirm_lag) {
    const int eff = state_.t - rl.map_index;
    const int pos = eff - trimmed_ - 1;
    std::int64_t loc;
    if (pos <= 0) {
      loc = times_.front();
    } else {
      loc = times_[pos - 1] + 1;
    }
    bool dup = false;
    const std::int64_t dedup =
        std::max<std::int64_t>(hp_.delta, hp_.delta_t);
    for (std::int64_t prior : alerted_) {
      if (std::abs(loc - prior) <= dedup) dup = true;
    }
    if (!dup) {
      alerted_.push_back(loc);
      events.push_back(
          {EventKind::ChangePoint, loc, loc, windowed, time});
    }
  }
  return events;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  const int n = cfg.n_series;
  std::vector<MatchResult> matches(n);
  std::vector<PhaseTimes> phase(n);
  std::vector<double> wall(n, 0.0);

  auto run_one = [&](int s) {
    const auto truth = generate_paper_series(cfg.sim, cfg.seed0 + s);
    std::vector<DetectionEvent> events;
    const auto start = std::chrono::steady_clock::now();
    if (cfg.method == BenchMethod::Bocpd) {
      BocpdDetector det(cfg.det.obs, cfg.det.hp);
      for (std::size_t i = 0; i < truth.values.size(); ++i) {
        auto evs = det.process(static_cast<std::int64_t>(i + 1),
                               truth.values[i]);
        events.insert(events.end(), evs.begin(), evs.end());
      }
    } else {
      DetectorConfig dc = cfg.det;
      dc.engine = cfg.method == BenchMethod::Bocd ? EngineKind::Bocd
                                                  : EngineKind::BocdAr;
      Detector det(dc);
      for (std::size_t i = 0; i < truth.values.size(); ++i) {
        auto evs = det.process(static_cast<std::int64_t>(i + 1),
                               truth.values[i]);
        events.insert(events.end(), evs.begin(), evs.end());
      }
      phase[s] = det.phase_times();
    }
    wall[s] = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
    matches[s] = match_events(truth, events, cfg.match, cfg.det.hp.confirm_lag,
                              cfg.det.hp.anomaly_confirm_lag);
  };

  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n; ++s) run_one(s);
  } else {
    for (int s = 0; s < n; ++s) run_one(s);
  }

  BenchmarkResult out;
  out.report = aggregate_metrics(matches);
  for (int s = 0; s < n; ++s) {
    out.phases.likelihoods += phase[s].likelihoods;
    out.phases.recursion += phase[s].recursion;
    out.phases.anomaly_loop += phase[s].anomaly_loop;
    out.phases.change_posterior += phase[s].change_posterior;
    out.detect_seconds += wall[s];
  }
  return out;
}

}  // namespace bocd
