#include "bocd/hyper_bound.hpp"

#include <cmath>
#include <stdexcept>

namespace bocd {

double spurious_alarm_log_odds(double p0, double q0, int delta_t) {
  if (!(p0 > 0.0 && p0 < 1.0) || !(q0 > 0.0 && q0 < 1.0) || delta_t < 1) {
    throw std::invalid_argument("spurious_alarm_rate: invalid inputs");
  }
  double s = 0.0;
  for (int i = 0; i < delta_t; ++i) {
    s += std::pow(1.0 - q0, i) * std::pow(1.0 - p0, delta_t - 1 - i);
  }
  return std::log(q0) + std::log(s) - delta_t * std::log1p(-q0);
}

double spurious_alarm_rate(double p0, double q0, int delta_t) {
  const double lo = spurious_alarm_log_odds(p0, q0, delta_t);
  if (lo > 0.0) {
    return 1.0 / (1.0 + std::exp(-lo));
  }
  const double e = std::exp(lo);
  return e / (1.0 + e);
}

double q0_upper_bound(double p0, int delta_t, double lambda_a) {
  if (!(lambda_a > 0.0 && lambda_a < 1.0)) {
    throw std::invalid_argument("lambda_a must lie in (0,1)");
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spurious_alarm_rate(p0, mid, delta_t) < lambda_a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lambda_a_lower_bound(double p0, double q0, int delta_t) {
  return spurious_alarm_rate(p0, q0, delta_t);
}

}  // namespace bocd
