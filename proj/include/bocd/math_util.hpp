#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace bocd {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

/// log sum of exponentials over a range of log values.
inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

/// Index of the largest value; ties resolve to the smallest index.
inline int arg_max(std::span<const double> xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

/// Execution mode for the per-step kernels. Serial is the reference
/// implementation; Parallel runs the same kernels under OpenMP.
enum class Exec { Serial, Parallel };

}  // namespace bocd
