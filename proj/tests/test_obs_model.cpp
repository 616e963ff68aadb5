#include <doctest.h>

#include <cmath>
#include <random>

#include "bocd/obs_model.hpp"
#include "support/quadrature_oracle.hpp"

using namespace bocd;

namespace {
const ObsModelConfig kDefault{};  // intercept-only, 0.25 / 1 / 0.01
}

TEST_CASE("config validation") {
  ObsModelConfig bad = kDefault;
  bad.sigma0_sq = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kDefault;
  bad.v0 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kDefault;
  bad.feature_dim = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ObsModelConfig reg = kDefault;
  reg.variant = ObsVariant::GaussianLinearRegression;
  reg.feature_dim = 3;
  CHECK_NOTHROW(reg.validate());
}

TEST_CASE("empty stats") {
  auto s = empty_stats(kDefault);
  CHECK(s.count() == 0);
  CHECK(log_marginal(s, kDefault) == 0.0);
}

TEST_CASE("push counts observations and is exchangeable") {
  auto s = push(empty_stats(kDefault), 2.0);
  CHECK(s.count() == 1);
  auto s5 = empty_stats(kDefault);
  for (int i = 0; i < 5; ++i) s5.add(0.3 * i);
  CHECK(s5.count() == 5);

  const auto ab = push(push(empty_stats(kDefault), -1.3), 2.4);
  const auto ba = push(push(empty_stats(kDefault), 2.4), -1.3);
  CHECK(log_marginal(ab, kDefault) ==
        doctest::Approx(log_marginal(ba, kDefault)).epsilon(1e-12));
}

TEST_CASE("feature dimension mismatch is an error") {
  ObsModelConfig reg = kDefault;
  reg.variant = ObsVariant::GaussianLinearRegression;
  reg.feature_dim = 2;
  auto s = empty_stats(reg);
  const double one_feature[] = {1.0};
  CHECK_THROWS_AS(s.add(1.0, one_feature), std::invalid_argument);
  CHECK_THROWS_AS((void)push(empty_stats(kDefault), 1.0, one_feature),
                  std::invalid_argument);
}

TEST_CASE("log marginal matches the quadrature oracle") {
  auto check_segment = [&](std::span<const double> y) {
    SuffStats s(kDefault);
    for (double v : y) s.add(v);
    const double got = s.log_marginal(kDefault);
    const double want = testing::quadrature_log_marginal(y, kDefault);
    CHECK(got == doctest::Approx(want).epsilon(5e-7));
  };
  const double single[] = {2.0};
  check_segment(single);
  const double constant[] = {3.1, 3.1, 3.1};
  check_segment(constant);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> val(-20.0, 20.0);
  std::uniform_int_distribution<int> len(1, 5);
  for (int rep = 0; rep < 12; ++rep) {
    std::vector<double> y(len(rng));
    for (auto& v : y) v = val(rng);
    check_segment(y);
  }
}

TEST_CASE("one-feature regression matches its quadrature oracle") {
  ObsModelConfig reg = kDefault;
  reg.variant = ObsVariant::GaussianLinearRegression;
  reg.feature_dim = 1;
  reg.k0 = 0.5;  // keep the coefficient prior reasonably tight for quadrature
  const std::vector<double> y{1.2, -0.7, 2.5};
  const std::vector<double> x{0.5, -1.0, 1.5};
  SuffStats s(reg);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double xi[] = {x[i]};
    s.add(y[i], xi);
  }
  const double got = s.log_marginal(reg);
  const double want = testing::quadrature_log_marginal_1feature(y, x, reg);
  CHECK(got == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("regression with all-zero features reduces to intercept-only") {
  ObsModelConfig reg = kDefault;
  reg.variant = ObsVariant::GaussianLinearRegression;
  reg.feature_dim = 2;
  SuffStats a(reg), b(kDefault);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> val(1.0, 2.0);
  const double zero[] = {0.0, 0.0};
  for (int i = 0; i < 20; ++i) {
    const double v = val(rng);
    a.add(v, zero);
    b.add(v);
    CHECK(a.log_marginal(reg) ==
          doctest::Approx(b.log_marginal(kDefault)).epsilon(1e-12));
  }
}

TEST_CASE("predictive is the marginal ratio") {
  SuffStats s(kDefault);
  s.add(2.0);
  const double direct =
      push(s, 2.0).log_marginal(kDefault) - s.log_marginal(kDefault);
  CHECK(log_predictive(s, 2.0, {}, kDefault) ==
        doctest::Approx(direct).epsilon(1e-12));

  // Empty history: the predictive is the single-point marginal.
  auto e = empty_stats(kDefault);
  SuffStats one(kDefault);
  one.add(2.0);
  CHECK(log_predictive(e, 2.0, {}, kDefault) ==
        doctest::Approx(one.log_marginal(kDefault)).epsilon(1e-12));

  // Cross-check a surprising observation against the quadrature oracle.
  SuffStats three(kDefault);
  for (double v : {1.0, 2.0, 3.0}) three.add(v);
  const double got = log_predictive(three, 10.0, {}, kDefault);
  const double y4[] = {1.0, 2.0, 3.0, 10.0};
  const double y3[] = {1.0, 2.0, 3.0};
  const double want = testing::quadrature_log_marginal(y4, kDefault) -
                      testing::quadrature_log_marginal(y3, kDefault);
  CHECK(got == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("telescoping predictives reproduce the marginal") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> val(0.0, 4.0);
  std::vector<double> y(50);
  for (auto& v : y) v = val(rng);

  SuffStats s(kDefault);
  double sum = 0.0;
  for (double v : y) {
    sum += log_predictive(s, v, {}, kDefault);
    s.add(v);
  }
  CHECK(sum == doctest::Approx(s.log_marginal(kDefault)).epsilon(1e-10));
}

TEST_CASE("min-max normalized inputs keep logs finite") {
  SuffStats s(kDefault);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    s.add(val(rng));
    CHECK(std::isfinite(s.log_marginal(kDefault)));
  }
}
