#include "bocd/obs_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bocd {

void ObsModelConfig::validate() const {
  if (!(sigma0_sq > 0.0) || !(v0 > 0.0) || !(k0 > 0.0)) {
    throw std::invalid_argument("obs model hyperparameters must be positive");
  }
  if (feature_dim < 0) {
    throw std::invalid_argument("feature_dim must be nonnegative");
  }
  if ((variant == ObsVariant::GaussianInterceptOnly) != (feature_dim == 0)) {
    throw std::invalid_argument(
        "feature_dim must be 0 iff the variant is intercept-only");
  }
}

SuffStats::SuffStats(const ObsModelConfig& cfg) : dim_(cfg.design_dim()) {
  cfg.validate();
  if (dim_ > 1) {
    ztz_ = Eigen::MatrixXd::Zero(dim_, dim_);
    zty_ = Eigen::VectorXd::Zero(dim_);
  }
}

void SuffStats::add(double y, std::span<const double> x) {
  if (static_cast<int>(x.size()) != dim_ - 1) {
    throw std::invalid_argument("feature vector length does not match config");
  }
  ++n_;
  sum_y_ += y;
  sum_yy_ += y * y;
  if (dim_ > 1) {
    Eigen::VectorXd z(dim_);
    z(0) = 1.0;
    for (int i = 0; i < dim_ - 1; ++i) z(i + 1) = x[i];
    ztz_.selfadjointView<Eigen::Lower>().rankUpdate(z);
    zty_ += y * z;
  }
}

double SuffStats::log_marginal(const ObsModelConfig& cfg) const {
  if (n_ == 0) return 0.0;
  const double a0 = 0.5 * cfg.v0;
  const double b0 = 0.5 * cfg.v0 * cfg.sigma0_sq;
  const double an = a0 + 0.5 * n_;

  double log_det0, log_detn, quad;
  if (dim_ == 1) {
    const double lam = cfg.k0 + n_;
    log_det0 = std::log(cfg.k0);
    log_detn = std::log(lam);
    quad = sum_yy_ - sum_y_ * sum_y_ / lam;
  } else {
    Eigen::MatrixXd lam = ztz_.selfadjointView<Eigen::Lower>();
    lam.diagonal().array() += cfg.k0;
    Eigen::LLT<Eigen::MatrixXd> llt(lam);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("posterior precision not positive definite");
    }
    log_det0 = dim_ * std::log(cfg.k0);
    log_detn = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    quad = sum_yy_ - zty_.dot(llt.solve(zty_));
  }
  const double bn = b0 + 0.5 * std::max(quad, 0.0);
  return -0.5 * n_ * std::log(2.0 * std::numbers::pi) +
         0.5 * (log_det0 - log_detn) + a0 * std::log(b0) - an * std::log(bn) +
         std::lgamma(an) - std::lgamma(a0);
}

SuffStats empty_stats(const ObsModelConfig& cfg) { return SuffStats(cfg); }

SuffStats push(SuffStats stats, double y, std::span<const double> x) {
  stats.add(y, x);
  return stats;
}

double log_marginal(const SuffStats& stats, const ObsModelConfig& cfg) {
  return stats.log_marginal(cfg);
}

double log_predictive(const SuffStats& stats_prev, double y,
                      std::span<const double> x, const ObsModelConfig& cfg) {
  return push(stats_prev, y, x).log_marginal(cfg) -
         stats_prev.log_marginal(cfg);
}

}  // namespace bocd
