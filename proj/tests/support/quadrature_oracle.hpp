#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <span>

#include "bocd/obs_model.hpp"

namespace bocd::testing {

/// Brute-force marginal likelihood of a segment under the intercept-only
/// model: the defining integral over (mean, variance) evaluated with nested
/// adaptive quadrature on (mean, log variance). Independent of the closed
/// form used by the library.
inline double quadrature_log_marginal(std::span<const double> y,
                                      const ObsModelConfig& cfg) {
  const int n = static_cast<int>(y.size());
  if (n == 0) return 0.0;
  const double a0 = 0.5 * cfg.v0;
  const double b0 = 0.5 * cfg.v0 * cfg.sigma0_sq;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  double max_abs = 0.0;
  for (double v : y) max_abs = std::max(max_abs, std::fabs(v));

  using boost::math::quadrature::gauss_kronrod;
  auto outer = [&](double u) {
    const double var = std::exp(u);
    const double sd = std::sqrt(var);
    // inverse-gamma density times the exp(u) Jacobian
    const double log_ig = a0 * std::log(b0) - std::lgamma(a0) -
                          (a0 + 1.0) * u - b0 / var + u;
    const double prior_sd = sd / std::sqrt(cfg.k0);
    auto inner = [&](double mu) {
      double log_f = -0.5 * mu * mu / (prior_sd * prior_sd) -
                     std::log(prior_sd) + std::log(inv_sqrt_2pi);
      for (double v : y) {
        const double z = (v - mu) / sd;
        log_f += -0.5 * z * z - std::log(sd) + std::log(inv_sqrt_2pi);
      }
      return std::exp(log_f);
    };
    const double span = 10.0 * prior_sd + max_abs + 10.0 * sd;
    const double val = gauss_kronrod<double, 61>::integrate(
        inner, -span, span, 12, 1e-12);
    return val * std::exp(log_ig);
  };

  const double lo = std::log(b0) - 30.0;
  const double hi = 45.0;
  const double total =
      gauss_kronrod<double, 61>::integrate(outer, lo, hi, 12, 1e-11);
  return std::log(total);
}

/// Same idea for the one-feature regression model: a three-dimensional
/// integral over (intercept, slope, log variance).
inline double quadrature_log_marginal_1feature(std::span<const double> y,
                                               std::span<const double> x,
                                               const ObsModelConfig& cfg) {
  const int n = static_cast<int>(y.size());
  if (n == 0) return 0.0;
  const double a0 = 0.5 * cfg.v0;
  const double b0 = 0.5 * cfg.v0 * cfg.sigma0_sq;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  double max_abs = 0.0;
  for (double v : y) max_abs = std::max(max_abs, std::fabs(v));

  using boost::math::quadrature::gauss_kronrod;
  auto outer = [&](double u) {
    const double var = std::exp(u);
    const double sd = std::sqrt(var);
    const double log_ig = a0 * std::log(b0) - std::lgamma(a0) -
                          (a0 + 1.0) * u - b0 / var + u;
    const double prior_sd = sd / std::sqrt(cfg.k0);
    const double span = 8.0 * prior_sd + 4.0 * max_abs + 8.0 * sd;
    auto mid = [&](double b0_coef) {
      auto inner = [&](double b1_coef) {
        double log_f = -0.5 * (b0_coef * b0_coef + b1_coef * b1_coef) /
                           (prior_sd * prior_sd) -
                       2.0 * std::log(prior_sd) + 2.0 * std::log(inv_sqrt_2pi);
        for (int i = 0; i < n; ++i) {
          const double z = (y[i] - b0_coef - b1_coef * x[i]) / sd;
          log_f += -0.5 * z * z - std::log(sd) + std::log(inv_sqrt_2pi);
        }
        return std::exp(log_f);
      };
      return gauss_kronrod<double, 31>::integrate(inner, -span, span, 6,
                                                  1e-9);
    };
    const double val =
        gauss_kronrod<double, 31>::integrate(mid, -span, span, 6, 1e-9);
    return val * std::exp(log_ig);
  };

  const double lo = std::log(b0) - 25.0;
  const double hi = 35.0;
  const double total =
      gauss_kronrod<double, 31>::integrate(outer, lo, hi, 8, 1e-9);
  return std::log(total);
}

}  // namespace bocd::testing
