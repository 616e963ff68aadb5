#include "bocd/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "bocd/bocd_engine.hpp"
#include "bocd/math_util.hpp"

namespace bocd {

namespace {

using Buckets = std::vector<std::vector<double>>;  // per-bucket log weights

void put(Buckets& b, int i, double w) {
  if (i >= static_cast<int>(b.size())) b.resize(i + 1);
  b[i].push_back(w);
}

std::vector<double> collapse(const Buckets& b, int size) {
  std::vector<double> out(size, kNegInf);
  for (int i = 0; i < static_cast<int>(b.size()) && i < size; ++i) {
    out[i] = log_sum_exp(b[i]);
  }
  return out;
}

}  // namespace

OracleTables enumerate_joint(std::span<const double> y, const OracleLaw& law,
                             const ObsModelConfig& cfg) {
  const int T = static_cast<int>(y.size());
  if (T < 1 || T > 12) {
    throw std::invalid_argument("oracle enumeration requires 1 <= T <= 12");
  }

  // Marginal likelihood of every contiguous segment (1-based, inclusive).
  std::vector<std::vector<double>> seg(T + 1, std::vector<double>(T + 1, 0.0));
  for (int i = 1; i <= T; ++i) {
    SuffStats s(cfg);
    for (int j = i; j <= T; ++j) {
      s.add(y[j - 1]);
      seg[i][j] = s.log_marginal(cfg);
    }
  }

  const double log_p0 = std::log(law.p0);
  const double log_q0 = std::log(law.q0);
  const double log_1p0 = std::log1p(-law.p0);
  const double log_1q0 = std::log1p(-law.q0);

  Buckets anom_flat, clean_b, total_b, end_b, cp_b, pair_flat;
  std::vector<double> all_paths;
  // Ragged buckets flattened as d * T + r (and r * T + rp for pairs).
  auto put_cell = [&](Buckets& b, int i, int j, double w) {
    put(b, i * T + j, w);
  };

  std::vector<int> c(T + 1, 0), a(T + 1, 0);
  c[1] = 1;
  const long n_paths = 1L << (T - 1);
  for (long mask = 0; mask < n_paths; ++mask) {
    for (int t = 2; t <= T; ++t) c[t] = (mask >> (t - 2)) & 1;

    double log_prior = 0.0;
    std::vector<int> changes{1};
    a[1] = 0;
    for (int t = 2; t <= T; ++t) {
      bool q_regime;
      if (law.coding == PriorCoding::TheoremBranches) {
        const int tau = changes.back();
        q_regime = (a[tau] == 0 && tau != 1 && t - tau <= law.delta_t);
      } else {
        q_regime = false;
        for (int tp = std::max(2, t - law.delta_t); tp <= t - 1; ++tp) {
          if (c[tp] != 1 || a[tp] != 0) continue;
          bool quiet = true;
          for (int s = tp + 1; s <= t - 1; ++s) {
            if (c[s] == 1) quiet = false;
          }
          if (quiet) q_regime = true;
        }
      }
      if (c[t] == 1) {
        a[t] = q_regime ? 1 : 0;
        log_prior += q_regime ? log_q0 : log_p0;
        changes.push_back(t);
      } else {
        a[t] = 0;
        log_prior += q_regime ? log_1q0 : log_1p0;
      }
    }

    double log_like = 0.0;
    const int k = static_cast<int>(changes.size());
    for (int i = 0; i < k; ++i) {
      const int from = changes[i];
      const int to = (i + 1 < k) ? changes[i + 1] - 1 : T;
      log_like += seg[from][to];
    }
    const double w = log_prior + log_like;
    all_paths.push_back(w);

    const int tau_last = changes.back();
    const int r = T - tau_last;
    const bool ended = a[tau_last] == 1;

    // Most recent change point: the latest start-type change that is not an
    // anomaly start (i.e. not immediately followed by an end-type change).
    int cp_time = 1;
    for (int i = k - 1; i >= 0; --i) {
      const int tau = changes[i];
      if (a[tau] != 0) continue;
      if (i + 1 < k && a[changes[i + 1]] == 1) continue;
      cp_time = tau;
      break;
    }
    const int d = T - cp_time;

    put(total_b, d, w);
    if (ended) {
      put_cell(anom_flat, d, r, w);
      put(end_b, r, w);
      const int start = changes[k - 2];
      put_cell(pair_flat, r, tau_last - start - 1, w);
    } else {
      put(clean_b, d, w);
      put(cp_b, r, w);
    }
  }

  OracleTables out;
  out.clean = collapse(clean_b, T);
  out.total = collapse(total_b, T);
  out.end_tab = collapse(end_b, T);
  out.cp_tab = collapse(cp_b, T);
  out.anom.resize(T);
  for (int d = 0; d < T; ++d) {
    const int r_cap = std::max(0, max_anomaly_run(T, d, law.delta_t));
    out.anom[d].assign(r_cap, kNegInf);
    for (int r = 0; r < r_cap; ++r) {
      const int flat = d * T + r;
      if (flat < static_cast<int>(anom_flat.size()) &&
          !anom_flat[flat].empty()) {
        out.anom[d][r] = log_sum_exp(anom_flat[flat]);
      }
    }
  }
  out.pair_tab.resize(T);
  for (int r = 0; r < T; ++r) {
    const int a_cap = max_body_offset(T - r, T - r - 1, law.delta_t);
    out.pair_tab[r].assign(std::max(0, a_cap + 1), kNegInf);
    for (int rp = 0; rp <= a_cap; ++rp) {
      const int flat = r * T + rp;
      if (flat < static_cast<int>(pair_flat.size()) &&
          !pair_flat[flat].empty()) {
        out.pair_tab[r][rp] = log_sum_exp(pair_flat[flat]);
      }
    }
  }
  out.log_evidence_paths = log_sum_exp(all_paths);
  out.log_evidence_buckets = log_sum_exp(out.total);
  return out;
}

}  // namespace bocd
