#include "bocd/bocd_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace bocd {

void Hyperparams::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0) || !(q0 > 0.0 && q0 < 1.0)) {
    throw std::invalid_argument("p0 and q0 must lie strictly in (0,1)");
  }
  if (delta_t < 1) throw std::invalid_argument("delta_t must be >= 1");
  if (!(delta_t < u_a && u_a < u_c)) {
    throw std::invalid_argument("require delta_t < u_a < u_c");
  }
  if (!(lambda_a > 0.0) || !(lambda_c > 0.0)) {
    throw std::invalid_argument("thresholds must be positive");
  }
  if (delta < 0 || confirm_lag < 0 || anomaly_confirm_lag < 0) {
    throw std::invalid_argument("lags and delta must be nonnegative");
  }
  if (trunc_mass) {
    if (!(*trunc_mass > 0.0 && *trunc_mass < 1.0)) {
      throw std::invalid_argument("trunc_mass must lie in (0,1)");
    }
    if (min_range_len < delta_t + 3) {
      throw std::invalid_argument("min_range_len must be >= delta_t + 3");
    }
  }
}

namespace {

// Smallest kept index such that posterior mass beyond it is below trunc_mass,
// floored at min_range_len - 1.
int mass_cutoff(const std::vector<double>& log_joint, const Hyperparams& hp) {
  const int n = static_cast<int>(log_joint.size()) - 1;
  if (!hp.trunc_mass) return n;
  const double total = log_sum_exp(log_joint);
  if (total == kNegInf) return n;
  const double limit = std::log(*hp.trunc_mass) + total;
  double tail = kNegInf;
  int cut = n;
  for (int d = n; d >= hp.min_range_len - 1; --d) {
    tail = log_add(tail, log_joint[d]);
    if (tail >= limit) break;
    cut = d - 1;
  }
  return std::max(cut, hp.min_range_len - 1);
}

void refresh_anom_marginal(BocdState& st) {
  const int n = st.n_c();
  st.anom_marg.assign(n + 1, kNegInf);
  std::vector<double> cell_max(n + 1, kNegInf);
  for (const auto& row : st.anom) {
    for (int r = 0; r < static_cast<int>(row.size()); ++r) {
      cell_max[r] = std::max(cell_max[r], row[r]);
    }
  }
  std::vector<double> acc(n + 1, 0.0);
  for (const auto& row : st.anom) {
    for (int r = 0; r < static_cast<int>(row.size()); ++r) {
      if (cell_max[r] > kNegInf) acc[r] += std::exp(row[r] - cell_max[r]);
    }
  }
  for (int r = 0; r <= n; ++r) {
    if (cell_max[r] > kNegInf) st.anom_marg[r] = cell_max[r] + std::log(acc[r]);
  }
}

}  // namespace

void bocd_step(BocdState& st, const SegmentCache& cache, const Hyperparams& hp,
               Exec exec) {
  if (st.t == 0) {
    st.t = 1;
    st.anom = {{}};  // R(1,0) < 1: no admissible anomaly-end cell
    st.clean = {cache.log_marginal_age(0)};
    st.total = st.clean;
    st.anom_marg = {kNegInf};
    st.clean_head_hist.push_front({1, st.clean});
    return;
  }

  const int t = st.t + 1;
  const int n_prev = st.n_c();
  const int n_new = std::min(n_prev + 1, hp.u_c);
  const double log_p0 = std::log(hp.p0);
  const double log_q0 = std::log(hp.q0);
  const double log_1p0 = std::log1p(-hp.p0);
  const double log_1q0 = std::log1p(-hp.q0);
  const double log_l_new = cache.log_marginal_age(0);  // log L(y^t)

  std::vector<std::vector<double>> anom(n_new + 1);
  std::vector<double> clean(n_new + 1), total(n_new + 1);

  // d = 0 birth of a fresh change point.
  if (t >= hp.delta_t + 3) {
    double s = kNegInf;
    for (int d = hp.delta_t; d <= n_prev; ++d) s = log_add(s, st.total[d]);
    clean[0] = s + log_l_new + log_p0;
  } else {
    clean[0] = st.total[t - 2] + log_l_new + log_p0;
  }

  auto update_row = [&](int d) {
    const double grow = (d > hp.delta_t || d == t - 1) ? log_1p0 : log_1q0;
    clean[d] = st.clean[d - 1] + cache.log_predictive_age(d) + grow;

    auto& row = anom[d];
    const int r_cap = max_anomaly_run(t, d, hp.delta_t);
    if (r_cap >= 1) {
      row.assign(r_cap, kNegInf);
      // Anomaly ends at time t: sum over admissible body lengths r' + 1.
      double birth = kNegInf;
      const int a_cap = max_body_offset(t, d, hp.delta_t);
      for (int rp = 0; rp <= a_cap; ++rp) {
        const auto& past_total = st.total_hist[rp];  // time t - 2 - rp
        const int idx = d - 2 - rp;
        if (idx < 0 || idx >= static_cast<int>(past_total.size())) continue;
        birth = log_add(birth, past_total[idx] +
                                   cache.prev_log_marginal_age(rp) + log_l_new +
                                   log_p0 + rp * log_1q0 + log_q0);
      }
      row[0] = birth;
      const auto& prev_row = st.anom[d - 1];
      for (int r = 1; r < r_cap; ++r) {
        row[r] = prev_row[r - 1] + cache.log_predictive_age(r) + log_1p0;
      }
    }
    total[d] = log_add(log_sum_exp(row), clean[d]);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int d = 1; d <= n_new; ++d) update_row(d);
  } else {
    for (int d = 1; d <= n_new; ++d) update_row(d);
  }
  total[0] = clean[0];  // R(t,0) < 1: no anomaly cells at d = 0

  // Keep the last delta_t total vectors for the next step's birth sum.
  st.total_hist.push_front(std::move(st.total));
  while (static_cast<int>(st.total_hist.size()) > hp.delta_t) {
    st.total_hist.pop_back();
  }

  st.t = t;
  st.anom = std::move(anom);
  st.clean = std::move(clean);
  st.total = std::move(total);

  const int cut = mass_cutoff(st.total, hp);
  if (cut < st.n_c()) {
    st.anom.resize(cut + 1);
    st.clean.resize(cut + 1);
    st.total.resize(cut + 1);
  }
  refresh_anom_marginal(st);

  const int head = std::min(hp.delta_t, st.n_c() + 1);
  st.clean_head_hist.push_front(
      {t, std::vector<double>(st.clean.begin(), st.clean.begin() + head)});
  while (static_cast<int>(st.clean_head_hist.size()) >
         hp.u_a + hp.delta_t + 2) {
    st.clean_head_hist.pop_back();
  }
}

RunLengthPosterior run_length_posterior(const BocdState& st) {
  const int n = st.n_c();
  std::vector<double> log_mass(n + 1);
  for (int r = 0; r <= n; ++r) {
    log_mass[r] = log_add(st.anom_marg[r], st.clean[r]);
  }
  const double norm = log_sum_exp(log_mass);
  RunLengthPosterior out;
  out.probs.resize(n + 1);
  for (int r = 0; r <= n; ++r) out.probs[r] = std::exp(log_mass[r] - norm);
  out.map_index = arg_max(log_mass);
  return out;
}

std::optional<double> anomaly_posterior(const BocdState& st,
                                        const Hyperparams& hp, int r_star,
                                        int n_a) {
  if (r_star > n_a) return std::nullopt;
  const int lo = std::max(0, r_star - hp.delta_t);
  double num = kNegInf, den = kNegInf;
  for (int r = lo; r <= r_star; ++r) {
    num = log_add(num, st.anom_marg[r]);
    den = log_add(den, log_add(st.anom_marg[r], st.clean[r]));
  }
  if (num == kNegInf) return 0.0;
  return std::exp(num - den);
}

std::optional<AnomalyEndpoints> anomaly_endpoints_sequential(
    const BocdState& st, const Hyperparams& hp, int r_star) {
  const int lo = std::max(0, r_star - hp.delta_t);
  int r1 = lo;
  for (int r = lo; r <= r_star; ++r) {
    if (st.anom_marg[r] > st.anom_marg[r1]) r1 = r;
  }
  if (st.anom_marg[r1] == kNegInf) return std::nullopt;

  const int want = st.t - r1 - 1;
  for (const auto& row : st.clean_head_hist) {
    if (row.time == want) {
      return AnomalyEndpoints{r1, arg_max(row.values)};
    }
  }
  throw std::logic_error("clean-table history does not cover time t-r1-1");
}

ChangePointEstimate map_change_point(const BocdState& st, int delta) {
  const int n = st.n_c();
  const int d_star = arg_max(st.total);
  const double norm = log_sum_exp(st.total);
  double win = kNegInf;
  for (int d = std::max(0, d_star - delta); d <= std::min(n, d_star + delta);
       ++d) {
    win = log_add(win, st.total[d]);
  }
  return {d_star, std::exp(win - norm)};
}

}  // namespace bocd
