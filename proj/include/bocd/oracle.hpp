#pragma once

#include <span>
#include <vector>

#include "bocd/obs_model.hpp"

namespace bocd {

/// How the path prior is evaluated during enumeration. The two codings are
/// expected to coincide; keeping both makes the equivalence checkable.
enum class PriorCoding {
  /// State-machine form: the anomaly-end probability q0 applies exactly when
  /// the most recent change is a start-type change, not at time 1, and within
  /// delta_t. This is the law the recursions' branch structure encodes.
  TheoremBranches,
  /// Literal scan of the generative definition: q0 applies when some recent
  /// start-type change has seen no change since.
  GenerativeProse,
};

struct OracleLaw {
  double p0 = 0.1;
  double q0 = 0.2;
  int delta_t = 4;
  PriorCoding coding = PriorCoding::TheoremBranches;
};

/// Exact joint-likelihood tables at the final time of the series, obtained by
/// summing over every admissible change history. Each history is weighted by
/// its prior probability times the product of independent segment marginals.
struct OracleTables {
  // Tables indexed like the quadratic engine.
  std::vector<std::vector<double>> anom;
  std::vector<double> clean;
  std::vector<double> total;
  // Tables indexed like the linear engine.
  std::vector<double> end_tab;
  std::vector<double> cp_tab;
  std::vector<std::vector<double>> pair_tab;
  /// Total data likelihood summed directly over histories.
  double log_evidence_paths = 0.0;
  /// Total data likelihood summed over terminal buckets.
  double log_evidence_buckets = 0.0;
};

/// Brute-force path enumeration; series length must be <= 12.
OracleTables enumerate_joint(std::span<const double> y, const OracleLaw& law,
                             const ObsModelConfig& cfg);

}  // namespace bocd
