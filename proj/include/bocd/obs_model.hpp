#pragma once

#include <Eigen/Dense>
#include <span>

namespace bocd {

enum class ObsVariant { GaussianInterceptOnly, GaussianLinearRegression };

/// Conjugate Gaussian observation model. The unknown segment parameters are
/// regression coefficients (an intercept plus `feature_dim` regressors) and
/// the noise variance. The prior is normal/inverse-gamma:
///   variance ~ InvGamma(v0/2, v0*sigma0_sq/2)
///   coefficients | variance ~ N(0, variance/k0 * I)
/// so segment marginal likelihoods have a closed form.
struct ObsModelConfig {
  ObsVariant variant = ObsVariant::GaussianInterceptOnly;
  double sigma0_sq = 0.25;  // prior variance scale
  double v0 = 1.0;          // prior degrees of freedom
  double k0 = 0.01;         // prior precision scale
  int feature_dim = 0;      // regressors beside the intercept

  int design_dim() const { return 1 + feature_dim; }
  /// Throws std::invalid_argument on nonpositive hyperparameters or a
  /// feature_dim inconsistent with the variant.
  void validate() const;
};

/// Order-free accumulators for one contiguous segment: everything needed to
/// evaluate the segment marginal likelihood exactly. Immutable value
/// semantics; `add` mutates in place for the hot path, `push` returns a copy.
class SuffStats {
 public:
  SuffStats() = default;
  explicit SuffStats(const ObsModelConfig& cfg);

  int count() const { return n_; }
  void add(double y, std::span<const double> x = {});

  /// log of the segment marginal likelihood with parameters integrated out;
  /// 0 for the empty segment.
  double log_marginal(const ObsModelConfig& cfg) const;

 private:
  int n_ = 0;
  int dim_ = 1;
  double sum_y_ = 0.0;
  double sum_yy_ = 0.0;
  Eigen::MatrixXd ztz_;  // design cross products, regression variant only
  Eigen::VectorXd zty_;
};

SuffStats empty_stats(const ObsModelConfig& cfg);
SuffStats push(SuffStats stats, double y, std::span<const double> x = {});
double log_marginal(const SuffStats& stats, const ObsModelConfig& cfg);

/// log Pr(y | segment so far) = log_marginal(segment + y) - log_marginal(segment).
double log_predictive(const SuffStats& stats_prev, double y,
                      std::span<const double> x, const ObsModelConfig& cfg);

}  // namespace bocd
