#include <doctest.h>

#include <cmath>
#include <map>

#include "bocd/sim_gen.hpp"

using namespace bocd;

TEST_CASE("benchmark series has the planted layout") {
  PaperSimConfig cfg;
  const auto s = generate_paper_series(cfg, 11);
  CHECK(s.values.size() == 1000);
  CHECK(s.change_points ==
        std::vector<std::int64_t>{75, 175, 300, 450, 625, 825});
  CHECK(s.anomalies.size() == 10);
  int spurious = 0;
  for (const auto& an : s.anomalies) {
    if (an.kind == EventKind::SpuriousAnomaly) {
      ++spurious;
      CHECK(an.start == 300);
      CHECK(an.end == 303);
    } else {
      CHECK((an.start - 52) % 100 == 0);
      CHECK(an.end - an.start + 1 <= 4);
      // Anomalies stay inside one segment.
      for (auto cp : s.change_points) {
        CHECK(!(cp > an.start && cp <= an.end + 1));
      }
    }
    CHECK(an.mean_shift != 0.0);
  }
  CHECK(spurious == 1);
}

TEST_CASE("same seed reproduces the series bit for bit") {
  PaperSimConfig cfg;
  const auto a = generate_paper_series(cfg, 123);
  const auto b = generate_paper_series(cfg, 123);
  CHECK(a.values == b.values);
  const auto c = generate_paper_series(cfg, 124);
  CHECK(a.values != c.values);
}

TEST_CASE("segment statistics stay near their planted parameters") {
  PaperSimConfig cfg;
  const auto s = generate_paper_series(cfg, 77);
  // Means of adjacent segments differ, and each segment's sample mean is
  // within 4 standard errors of some pool value after excluding anomalies.
  std::vector<std::int64_t> starts{1};
  for (auto cp : s.change_points) starts.push_back(cp);
  starts.push_back(cfg.length + 1);
  double prev_mean = 1e300;
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    double sum = 0.0;
    int n = 0;
    for (std::int64_t t = starts[k]; t < starts[k + 1]; ++t) {
      bool inside_anomaly = false;
      for (const auto& an : s.anomalies) {
        if (t >= an.start && t <= an.end) inside_anomaly = true;
      }
      if (inside_anomaly) continue;
      sum += s.values[t - 1];
      ++n;
    }
    const double mean = sum / n;
    const double se = cfg.noise_sd / std::sqrt(static_cast<double>(n));
    double best = 1e300;
    double best_pool = 0.0;
    for (double m : cfg.mean_pool) {
      if (std::fabs(mean - m) < best) {
        best = std::fabs(mean - m);
        best_pool = m;
      }
    }
    CHECK(best <= 4.0 * se);
    CHECK(best_pool != prev_mean);
    prev_mean = best_pool;
  }
}

TEST_CASE("generative sampler respects the prior regimes") {
  Hyperparams hp;
  hp.p0 = 0.05;
  hp.q0 = 0.3;
  hp.delta_t = 3;
  hp.u_a = 10;
  hp.u_c = 30;
  ObsModelConfig obs;

  // Count how often a change occurs exactly when the regime prescribes q0.
  long q0_trials = 0, q0_changes = 0;
  long p0_trials = 0, p0_changes = 0;
  const int T = 40;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    GenerativeTrace tr;
    (void)sample_generative(hp, obs, T, seed, &tr);
    int last_change = 1, last_a = 0;
    for (int t = 2; t <= T; ++t) {
      const bool q_regime =
          last_a == 0 && last_change != 1 && t - last_change <= hp.delta_t;
      if (q_regime) {
        ++q0_trials;
        q0_changes += tr.change[t];
      } else {
        ++p0_trials;
        p0_changes += tr.change[t];
      }
      if (tr.change[t] == 1) {
        last_change = t;
        last_a = tr.anomaly_end[t];
      }
    }
  }
  const double q_hat = static_cast<double>(q0_changes) / q0_trials;
  const double p_hat = static_cast<double>(p0_changes) / p0_trials;
  const double q_se = std::sqrt(hp.q0 * (1 - hp.q0) / q0_trials);
  const double p_se = std::sqrt(hp.p0 * (1 - hp.p0) / p0_trials);
  CHECK(std::fabs(q_hat - hp.q0) < 3.5 * q_se);
  CHECK(std::fabs(p_hat - hp.p0) < 3.5 * p_se);
}

TEST_CASE("generative sampler reverts parameters at anomaly ends") {
  Hyperparams hp;
  hp.p0 = 0.1;
  hp.q0 = 0.4;
  hp.delta_t = 3;
  hp.u_a = 10;
  hp.u_c = 30;
  ObsModelConfig obs;
  int reverts = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenerativeTrace tr;
    (void)sample_generative(hp, obs, 60, seed, &tr);
    int prev_change = 1;
    for (int t = 2; t <= 60; ++t) {
      if (tr.change[t] == 1 && tr.anomaly_end[t] == 1) {
        // The parameter at t equals the parameter just before the start.
        CHECK(tr.mean[t] == tr.mean[prev_change - 1]);
        CHECK(tr.variance[t] == tr.variance[prev_change - 1]);
        ++reverts;
      }
      if (tr.change[t] == 1) prev_change = t;
    }
  }
  CHECK(reverts > 50);
}

TEST_CASE("with p0 == q0 the change rate is flat") {
  Hyperparams hp;
  hp.p0 = 0.15;
  hp.q0 = 0.15;
  hp.delta_t = 2;
  hp.u_a = 10;
  hp.u_c = 30;
  ObsModelConfig obs;
  std::map<int, std::pair<long, long>> by_time;  // t -> (changes, trials)
  for (std::uint64_t seed = 0; seed < 6000; ++seed) {
    GenerativeTrace tr;
    (void)sample_generative(hp, obs, 12, seed, &tr);
    for (int t = 2; t <= 12; ++t) {
      auto& [c, n] = by_time[t];
      c += tr.change[t];
      ++n;
    }
  }
  for (const auto& [t, cn] : by_time) {
    const double rate = static_cast<double>(cn.first) / cn.second;
    const double se = std::sqrt(hp.p0 * (1 - hp.p0) / cn.second);
    CHECK(std::fabs(rate - hp.p0) < 4.0 * se);
  }
}
