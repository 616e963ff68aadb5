#include "bocd/bocd_ar_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace bocd {

namespace {

int ar_mass_cutoff(const std::vector<double>& end_tab,
                   const std::vector<double>& cp_tab, const Hyperparams& hp) {
  const int n = static_cast<int>(cp_tab.size()) - 1;
  if (!hp.trunc_mass) return n;
  std::vector<double> joint(n + 1);
  for (int r = 0; r <= n; ++r) joint[r] = log_add(end_tab[r], cp_tab[r]);
  const double total = log_sum_exp(joint);
  if (total == kNegInf) return n;
  const double limit = std::log(*hp.trunc_mass) + total;
  double tail = kNegInf;
  int cut = n;
  for (int r = n; r >= hp.min_range_len - 1; --r) {
    tail = log_add(tail, joint[r]);
    if (tail >= limit) break;
    cut = r - 1;
  }
  return std::max(cut, hp.min_range_len - 1);
}

}  // namespace

void ar_step(BocdArState& st, const SegmentCache& cache, const Hyperparams& hp,
             Exec exec) {
  if (st.t == 0) {
    st.t = 1;
    st.end_tab = {kNegInf};
    st.cp_tab = {cache.log_marginal_age(0)};
    if (st.joint) st.pair_tab = {{}};
    st.cp_head_hist.push_front({1, st.cp_tab});
    return;
  }

  const int t = st.t + 1;
  const int n_prev = st.n_c();
  const int n_new = std::min(n_prev + 1, hp.u_c);
  const int n_a_new = std::min(t - 1, hp.u_a);
  const double log_p0 = std::log(hp.p0);
  const double log_q0 = std::log(hp.q0);
  const double log_1p0 = std::log1p(-hp.p0);
  const double log_1q0 = std::log1p(-hp.q0);
  const double log_l_new = cache.log_marginal_age(0);

  std::vector<double> end_tab(n_new + 1), cp_tab(n_new + 1);

  // Births at r = 0. An anomaly end can only follow a recent start-type
  // change; a fresh change point follows either an old start-type change or
  // any anomaly end.
  {
    const int a_cap = std::min(max_body_offset(t, t - 1, hp.delta_t), n_prev);
    double end_birth = kNegInf;
    for (int rp = 0; rp <= a_cap; ++rp) {
      end_birth = log_add(end_birth, st.cp_tab[rp]);
    }
    end_tab[0] = end_birth + log_l_new + log_q0;

    double cp_base = kNegInf;
    if (t >= hp.delta_t + 3) {
      for (int rp = hp.delta_t; rp <= n_prev; ++rp) {
        cp_base = log_add(cp_base, st.cp_tab[rp]);
      }
    } else {
      cp_base = st.cp_tab[t - 2];
    }
    cp_base = log_add(cp_base, log_sum_exp(st.end_tab));
    cp_tab[0] = cp_base + log_l_new + log_p0;
  }

  auto grow_cell = [&](int r) {
    end_tab[r] = st.end_tab[r - 1] + cache.log_predictive_age(r) + log_1p0;
    const double factor =
        (r > hp.delta_t || r == t - 1) ? log_1p0 : log_1q0;
    cp_tab[r] = st.cp_tab[r - 1] + cache.log_predictive_age(r) + factor;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 1; r <= n_new; ++r) grow_cell(r);
  } else {
    for (int r = 1; r <= n_new; ++r) grow_cell(r);
  }

  std::vector<std::vector<double>> pair_tab;
  if (st.joint) {
    pair_tab.resize(n_a_new + 1);
    auto grow_pair_row = [&](int r) {
      auto& row = pair_tab[r];
      const int a_cap = max_body_offset(t - r, t - r - 1, hp.delta_t);
      if (a_cap < 0) return;
      row.assign(a_cap + 1, kNegInf);
      if (r == 0) {
        for (int rp = 0; rp <= std::min(a_cap, n_prev); ++rp) {
          row[rp] = st.cp_tab[rp] + log_l_new + log_q0;
        }
      } else {
        const double pred = cache.log_predictive_age(r) + log_1p0;
        for (int rp = 0; rp <= a_cap; ++rp) {
          row[rp] = st.pair_cell(r - 1, rp) + pred;
        }
      }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (int r = 0; r <= n_a_new; ++r) grow_pair_row(r);
    } else {
      for (int r = 0; r <= n_a_new; ++r) grow_pair_row(r);
    }
  }

  st.t = t;
  st.end_tab = std::move(end_tab);
  st.cp_tab = std::move(cp_tab);
  st.pair_tab = std::move(pair_tab);

  const int cut = ar_mass_cutoff(st.end_tab, st.cp_tab, hp);
  if (cut < st.n_c()) {
    st.end_tab.resize(cut + 1);
    st.cp_tab.resize(cut + 1);
    if (st.joint && static_cast<int>(st.pair_tab.size()) > cut + 1) {
      st.pair_tab.resize(cut + 1);
    }
  }

  const int head = std::min(hp.delta_t, st.n_c() + 1);
  st.cp_head_hist.push_front(
      {t, std::vector<double>(st.cp_tab.begin(), st.cp_tab.begin() + head)});
  while (static_cast<int>(st.cp_head_hist.size()) > hp.u_a + hp.delta_t + 2) {
    st.cp_head_hist.pop_back();
  }
}

RunLengthPosterior ar_run_length_posterior(const BocdArState& st) {
  const int n = st.n_c();
  std::vector<double> log_mass(n + 1);
  for (int r = 0; r <= n; ++r) {
    log_mass[r] = log_add(st.end_tab[r], st.cp_tab[r]);
  }
  const double norm = log_sum_exp(log_mass);
  RunLengthPosterior out;
  out.probs.resize(n + 1);
  for (int r = 0; r <= n; ++r) out.probs[r] = std::exp(log_mass[r] - norm);
  out.map_index = arg_max(log_mass);
  return out;
}

std::optional<double> ar_anomaly_posterior_fast(const BocdArState& st,
                                                const Hyperparams& hp,
                                                int r_star, int n_a) {
  if (r_star > n_a) return std::nullopt;
  const int lo = std::max(0, r_star - hp.delta_t);
  double num = kNegInf, den = kNegInf;
  for (int r = lo; r <= r_star; ++r) {
    num = log_add(num, st.end_tab[r]);
    den = log_add(den, log_add(st.end_tab[r], st.cp_tab[r]));
  }
  if (num == kNegInf) return 0.0;
  return std::exp(num - den);
}

std::optional<double> ar_anomaly_posterior_joint(const BocdArState& st,
                                                 const Hyperparams& hp,
                                                 int r_star, int n_a) {
  if (!st.joint) {
    throw std::logic_error("joint anomaly posterior requires joint mode");
  }
  if (r_star > n_a) return std::nullopt;
  const int lo = std::max(0, r_star - hp.delta_t);
  double num = kNegInf, den = kNegInf;
  for (int r = lo; r <= r_star; ++r) {
    const int a_cap = max_body_offset(st.t - r, st.t - r - 1, hp.delta_t);
    for (int rp = std::max(0, r_star - r - 1); rp <= a_cap; ++rp) {
      num = log_add(num, st.pair_cell(r, rp));
    }
    den = log_add(den, log_add(st.end_tab[r], st.cp_tab[r]));
  }
  if (num == kNegInf) return 0.0;
  return std::exp(num - den);
}

std::optional<AnomalyEndpoints> ar_anomaly_endpoints(
    const BocdArState& st, [[maybe_unused]] const Hyperparams& hp, int r_star,
    int n_a, EndpointMode mode) {
  if (mode == EndpointMode::Joint) {
    if (!st.joint) {
      throw std::logic_error("joint endpoint estimate requires joint mode");
    }
    int best_r = -1, best_rp = -1;
    double best = kNegInf;
    for (int r = 0; r < static_cast<int>(st.pair_tab.size()); ++r) {
      const auto& row = st.pair_tab[r];
      for (int rp = 0; rp < static_cast<int>(row.size()); ++rp) {
        if (row[rp] > best) {
          best = row[rp];
          best_r = r;
          best_rp = rp;
        }
      }
    }
    if (best == kNegInf) return std::nullopt;
    return AnomalyEndpoints{best_r, best_rp};
  }

  (void)r_star;
  int r1 = 0;
  for (int r = 0; r <= std::min(n_a, st.n_c()); ++r) {
    if (st.end_tab[r] > st.end_tab[r1]) r1 = r;
  }
  if (st.end_tab[r1] == kNegInf) return std::nullopt;
  const int want = st.t - r1 - 1;
  for (const auto& row : st.cp_head_hist) {
    if (row.time == want) {
      return AnomalyEndpoints{r1, arg_max(row.values)};
    }
  }
  throw std::logic_error("cp-table history does not cover time t-r1-1");
}

double ar_change_window_posterior(const BocdArState& st, int r_star,
                                  int delta) {
  const int n = st.n_c();
  std::vector<double> log_mass(n + 1);
  for (int r = 0; r <= n; ++r) {
    log_mass[r] = log_add(st.end_tab[r], st.cp_tab[r]);
  }
  const double norm = log_sum_exp(log_mass);
  double win = kNegInf;
  for (int r = std::max(0, r_star - delta); r <= std::min(n, r_star + delta);
       ++r) {
    win = log_add(win, log_mass[r]);
  }
  return std::exp(win - norm);
}

}  // namespace bocd
