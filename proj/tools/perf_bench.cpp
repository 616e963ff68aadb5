// Per-step timing of the detection kernels: serial reference vs OpenMP, and
// the quadratic engine vs the linear one, across search-range sizes.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "bocd/bocd_ar_engine.hpp"
#include "bocd/bocd_engine.hpp"
#include "bocd/segment_cache.hpp"

using namespace bocd;

namespace {

std::vector<double> noise_series(int len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(2.0, 0.5);
  std::vector<double> out(len);
  for (auto& v : out) v = noise(rng);
  return out;
}

struct Timing {
  double median_us = 0.0;
  double total_s = 0.0;
};

template <typename Step>
Timing time_steps(const std::vector<double>& y, const ObsModelConfig& cfg,
                  Exec exec, int warmup, Step&& step) {
  SegmentCache cache(cfg, exec);
  std::vector<double> per_step;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < static_cast<int>(y.size()); ++i) {
    const auto s0 = std::chrono::steady_clock::now();
    cache.advance(y[i]);
    const int keep = step(cache);
    cache.truncate(keep);
    const auto s1 = std::chrono::steady_clock::now();
    if (i >= warmup) {
      per_step.push_back(
          std::chrono::duration<double, std::micro>(s1 - s0).count());
    }
  }
  Timing t;
  t.total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::sort(per_step.begin(), per_step.end());
  if (!per_step.empty()) t.median_us = per_step[per_step.size() / 2];
  return t;
}

Timing time_bocd(const std::vector<double>& y, const Hyperparams& hp,
                 Exec exec) {
  BocdState st;
  return time_steps(y, {}, exec, hp.u_c + 50, [&](const SegmentCache& cache) {
    bocd_step(st, cache, hp, exec);
    return st.n_c() + 2;
  });
}

Timing time_ar(const std::vector<double>& y, const Hyperparams& hp,
               Exec exec) {
  BocdArState st;
  return time_steps(y, {}, exec, hp.u_c + 50, [&](const SegmentCache& cache) {
    ar_step(st, cache, hp, exec);
    return st.n_c() + 2;
  });
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("%-8s %-6s %14s %14s %9s %14s\n", "engine", "u_c",
              "serial med us", "openmp med us", "speedup", "ratio vs ar");

  for (int u_c : {50, 100, 200, 400, 800}) {
    Hyperparams hp;
    hp.u_c = u_c;
    hp.u_a = std::min(27, u_c - 1);
    const auto y = noise_series(2 * u_c + 300, 7);

    const auto bocd_serial = time_bocd(y, hp, Exec::Serial);
    const auto bocd_parallel = time_bocd(y, hp, Exec::Parallel);
    const auto ar_serial = time_ar(y, hp, Exec::Serial);
    const auto ar_parallel = time_ar(y, hp, Exec::Parallel);

    std::printf("%-8s %-6d %14.2f %14.2f %8.2fx %13.1fx\n", "bocd", u_c,
                bocd_serial.median_us, bocd_parallel.median_us,
                bocd_serial.median_us / std::max(1e-9, bocd_parallel.median_us),
                bocd_serial.median_us / std::max(1e-9, ar_serial.median_us));
    std::printf("%-8s %-6d %14.2f %14.2f %8.2fx %13s\n", "bocd-ar", u_c,
                ar_serial.median_us, ar_parallel.median_us,
                ar_serial.median_us / std::max(1e-9, ar_parallel.median_us),
                "--");
  }
  return 0;
}
