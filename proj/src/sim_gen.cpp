#include "bocd/sim_gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bocd {

namespace {

// Segment boundaries in 1-based time: segment k covers [starts[k], starts[k+1]).
std::vector<std::int64_t> segment_starts(const PaperSimConfig& cfg) {
  std::vector<std::int64_t> starts{1};
  for (auto cp : cfg.change_points) starts.push_back(cp);
  starts.push_back(cfg.length + 1);
  return starts;
}

}  // namespace

SimSeries generate_paper_series(const PaperSimConfig& cfg,
                                std::uint64_t seed) {
  if (cfg.length < 1 || cfg.mean_pool.size() < 2) {
    throw std::invalid_argument("infeasible simulation config");
  }
  for (std::size_t i = 1; i < cfg.change_points.size(); ++i) {
    if (cfg.change_points[i] <= cfg.change_points[i - 1]) {
      throw std::invalid_argument("change points must be increasing");
    }
  }

  std::mt19937_64 rng(seed);
  const auto starts = segment_starts(cfg);
  const int n_seg = static_cast<int>(starts.size()) - 1;

  // Segment means: adjacent segments must differ.
  std::vector<double> seg_mean(n_seg);
  std::uniform_int_distribution<int> pick(0,
                                          static_cast<int>(cfg.mean_pool.size()) - 1);
  for (int k = 0; k < n_seg; ++k) {
    double m = cfg.mean_pool[pick(rng)];
    while (k > 0 && m == seg_mean[k - 1]) m = cfg.mean_pool[pick(rng)];
    seg_mean[k] = m;
  }

  auto segment_of = [&](std::int64_t t) {
    int k = 0;
    while (k + 1 < n_seg && t >= starts[k + 1]) ++k;
    return k;
  };

  SimSeries out;
  out.seed = seed;
  out.change_points = cfg.change_points;

  // Plant one anomaly per block; the block containing the transitional
  // segment hosts it instead of a collective anomaly.
  std::uniform_int_distribution<int> pick_dur(
      0, static_cast<int>(cfg.anomaly_durations.size()) - 1);
  std::uniform_int_distribution<int> pick_shift(
      0, static_cast<int>(cfg.anomaly_shifts.size()) - 1);
  const int n_blocks = cfg.anomaly_every > 0 ? cfg.length / cfg.anomaly_every : 0;
  for (int b = 0; b < n_blocks; ++b) {
    const std::int64_t block_lo = static_cast<std::int64_t>(b) * cfg.anomaly_every + 1;
    const std::int64_t block_hi = block_lo + cfg.anomaly_every - 1;
    if (cfg.spurious_at >= block_lo && cfg.spurious_at <= block_hi &&
        std::find(cfg.change_points.begin(), cfg.change_points.end(),
                  cfg.spurious_at) != cfg.change_points.end()) {
      // Transitional segment glued to the change point. Its mean must stand
      // apart from both neighbouring segments to play the spurious role.
      const std::int64_t s = cfg.spurious_at;
      const std::int64_t e =
          std::min<std::int64_t>(s + cfg.spurious_duration - 1, cfg.length);
      const int seg = segment_of(s);
      double shift = cfg.anomaly_shifts[pick_shift(rng)];
      for (int guard = 0; guard < 64; ++guard) {
        const double m = seg_mean[seg] + shift;
        if (m != seg_mean[seg] && (seg == 0 || m != seg_mean[seg - 1])) break;
        shift = cfg.anomaly_shifts[pick_shift(rng)];
      }
      out.anomalies.push_back({s, e, EventKind::SpuriousAnomaly, shift});
      continue;
    }
    std::int64_t s = block_lo + cfg.anomaly_offset - 1;
    const int dur = cfg.anomaly_durations[pick_dur(rng)];
    const double shift = cfg.anomaly_shifts[pick_shift(rng)];
    // A collective anomaly closer than change_margin to a change point is
    // indistinguishable from the transitional phase of that change; nudge the
    // start until the interval clears every change point, or skip the block.
    auto clears = [&](std::int64_t start) {
      for (auto cp : cfg.change_points) {
        if (cp >= start - cfg.change_margin &&
            cp <= start + dur + cfg.change_margin) {
          return false;
        }
      }
      return start + dur - 1 <= cfg.length;
    };
    bool placed = false;
    for (; s <= block_hi; ++s) {
      if (clears(s)) {
        placed = true;
        break;
      }
    }
    if (!placed) continue;
    out.anomalies.push_back(
        {s, s + dur - 1, EventKind::CollectiveAnomaly, shift});
  }

  std::normal_distribution<double> noise(0.0, cfg.noise_sd);
  out.values.resize(cfg.length);
  for (std::int64_t t = 1; t <= cfg.length; ++t) {
    double mean = seg_mean[segment_of(t)];
    for (const auto& an : out.anomalies) {
      if (t >= an.start && t <= an.end) mean += an.mean_shift;
    }
    out.values[t - 1] = mean + noise(rng);
  }
  return out;
}

SimSeries sample_generative(const Hyperparams& hp, const ObsModelConfig& cfg,
                            int length, std::uint64_t seed,
                            GenerativeTrace* trace) {
  cfg.validate();
  hp.validate();
  if (cfg.variant != ObsVariant::GaussianInterceptOnly) {
    throw std::invalid_argument(
        "the generative sampler supports the intercept-only model");
  }
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(0.5 * cfg.v0, 1.0);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto draw_theta = [&](double& mean, double& var) {
    var = 0.5 * cfg.v0 * cfg.sigma0_sq / gamma(rng);
    mean = std::sqrt(var / cfg.k0) * unit(rng);
  };

  GenerativeTrace tr;
  tr.change.assign(length + 1, 0);
  tr.anomaly_end.assign(length + 1, 0);
  tr.mean.assign(length + 1, 0.0);
  tr.variance.assign(length + 1, 0.0);

  SimSeries out;
  out.seed = seed;
  out.values.resize(length);

  double mean = 0.0, var = 1.0;
  draw_theta(mean, var);
  tr.change[1] = 1;
  double pre_anomaly_mean = mean, pre_anomaly_var = var;
  int last_change = 1, last_change_a = 0;

  for (int t = 1; t <= length; ++t) {
    if (t > 1) {
      const bool q_regime = last_change_a == 0 && last_change != 1 &&
                            t - last_change <= hp.delta_t;
      const double p_change = q_regime ? hp.q0 : hp.p0;
      const bool change = std::bernoulli_distribution(p_change)(rng);
      if (change) {
        tr.change[t] = 1;
        if (q_regime) {
          tr.anomaly_end[t] = 1;
          mean = pre_anomaly_mean;  // parameters revert at an anomaly end
          var = pre_anomaly_var;
        } else {
          pre_anomaly_mean = mean;
          pre_anomaly_var = var;
          draw_theta(mean, var);
        }
        last_change = t;
        last_change_a = tr.anomaly_end[t];
      }
    }
    tr.mean[t] = mean;
    tr.variance[t] = var;
    out.values[t - 1] = mean + std::sqrt(var) * unit(rng);
  }

  // Assemble ground truth: a start-type change immediately followed by an
  // end-type change encloses an anomaly; other start-type changes are change
  // points.
  std::vector<int> changes;
  for (int t = 1; t <= length; ++t) {
    if (tr.change[t] == 1) changes.push_back(t);
  }
  for (std::size_t i = 0; i < changes.size(); ++i) {
    const int tau = changes[i];
    if (tr.anomaly_end[tau] == 1) continue;
    if (i + 1 < changes.size() && tr.anomaly_end[changes[i + 1]] == 1) {
      out.anomalies.push_back({tau, changes[i + 1] - 1,
                               EventKind::CollectiveAnomaly, 0.0});
    } else if (tau != 1) {
      out.change_points.push_back(tau);
    }
  }
  if (trace) *trace = std::move(tr);
  return out;
}

}  // namespace bocd
