#include <catch_amalgamated.hpp>

#include <cmath>

#include "smoothcop/distortion.hpp"
#include "smoothcop/errors.hpp"

using namespace smoothcop;
using Catch::Matchers::WithinAbs;

TEST_CASE("rate exponents of the relative error")
{
  CHECK_THAT(fit_rate_exponent(CharGenerator::gauss()), WithinAbs(1.0, 0.01));
  CHECK_THAT(fit_rate_exponent(CharGenerator::laplace()), WithinAbs(1.0, 0.01));
  CHECK_THAT(fit_rate_exponent(CharGenerator::cauchy()), WithinAbs(0.5, 0.03));
  CHECK_THAT(fit_rate_exponent(CharGenerator::stable(1.5)), WithinAbs(0.75, 0.03));
}

TEST_CASE("relative error curve")
{
  std::vector<double> u{ 0.0, 0.5, 1.0, 4.0 };
  auto small = relative_error_curve(CharGenerator::gauss(), 0.01, u);
  auto large = relative_error_curve(CharGenerator::gauss(), 0.1, u);
  CHECK(small.rel_error[0] == 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    CHECK_THAT(small.rel_error[k], WithinAbs(1.0 - std::exp(-0.005 * u[k]), 1e-15));
    CHECK(small.rel_error[k] <= large.rel_error[k]);
    if (k > 0)
      CHECK(small.rel_error[k] > small.rel_error[k - 1]);
  }
  CHECK(small.abs_bound.empty());
  CHECK_THROWS_AS(relative_error_curve(CharGenerator::gauss(), 0.0, u), std::domain_error);
}

TEST_CASE("absolute characteristic-function bound")
{
  Eigen::Matrix2d sigma;
  sigma << 1.0, 0.3, 0.3, 2.0;
  Eigen::MatrixXd t(2, 2);
  t << 1.0, 0.0, 0.5, -1.0;
  auto report = relative_error_curve(CharGenerator::laplace(), 0.2, std::vector<double>{ 1.0 }, sigma, t);
  REQUIRE(report.abs_bound.size() == 2);
  for (Eigen::Index r = 0; r < 2; ++r) {
    double q = t.row(r) * sigma * t.row(r).transpose();
    CHECK_THAT(report.abs_bound[std::size_t(r)], WithinAbs(1.0 - 1.0 / (1.0 + 0.1 * q), 1e-15));
  }
}

TEST_CASE("Laplace uniform bound")
{
  const double s2 = 1.5;
  const double M = laplace_default_M(s2);
  CHECK_THAT(M, WithinAbs(24.0 / std::sqrt(2.0 * s2), 1e-12));
  double previous = 0.0;
  for (double c : { 1e-6, 1e-4, 1e-2, 1.0 }) {
    auto b = laplace_uniform_bound(c, s2, M);
    INFO("c = " << c);
    CHECK(b.foc_residual < 1e-12);
    CHECK_THAT(b.bound, WithinAbs(laplace_bound_value(c, s2, M, b.T_star), 1e-12));
    CHECK(laplace_bound_value(c, s2, M, 0.98 * b.T_star) > b.bound);
    CHECK(laplace_bound_value(c, s2, M, 1.02 * b.T_star) > b.bound);
    CHECK(b.bound > previous);
    previous = b.bound;
  }
  // the bound shrinks roughly like c^(1/3) up to the log factor
  double r1 = laplace_uniform_bound(1e-9, s2, M).bound / std::cbrt(1e-9);
  double r2 = laplace_uniform_bound(1e-6, s2, M).bound / std::cbrt(1e-6);
  CHECK(r1 / r2 > 1.0);
  CHECK(r1 / r2 < 2.0);
  CHECK_THROWS_AS(laplace_uniform_bound(0.0, s2, M), std::domain_error);
  CHECK_THROWS_AS(laplace_uniform_bound(0.1, -1.0, M), std::domain_error);
  CHECK_THROWS_AS(laplace_uniform_bound(0.1, s2, 0.0), std::domain_error);
}

TEST_CASE("correlation preservation")
{
  EllipticalSpec spec;
  spec.mu = Eigen::Vector2d(0.5, -1.0);
  spec.sigma.resize(2, 2);
  spec.sigma << 1.0, 0.6, 0.6, 2.0;

  RandomStream rng(1);
  auto gauss = correlation_preservation_check(spec, CharGenerator::gauss(), 0.5, 200000, rng);
  CHECK(gauss.max_corr_gap < 0.01);
  CHECK_THAT(gauss.inflation_theory, WithinAbs(1.5, 1e-15));
  CHECK_THAT(gauss.inflation_observed, WithinAbs(1.5, 0.02));
  CHECK(std::abs(gauss.tau_x - gauss.tau_z) <= 4.0 * gauss.tau_diff_se + 1e-3);

  auto none = correlation_preservation_check(spec, CharGenerator::gauss(), 0.0, 2000, rng);
  CHECK(none.max_corr_gap == 0.0);
  CHECK(none.inflation_observed == 1.0);
  CHECK(none.tau_x == none.tau_z);

  spec.generator = CharGenerator::laplace();
  auto laplace = correlation_preservation_check(spec, CharGenerator::laplace(), 1.0, 200000, rng);
  CHECK_THAT(laplace.inflation_theory, WithinAbs(2.0, 1e-15));
  CHECK_THAT(laplace.inflation_observed, WithinAbs(2.0, 0.05));
  CHECK(laplace.max_corr_gap < 0.02);

  CHECK_THROWS_AS(correlation_preservation_check(spec, CharGenerator::cauchy(), 0.5, 100, rng),
                  UnsupportedOperation);
  CHECK_THROWS_AS(correlation_preservation_check(spec, CharGenerator::gauss(), -0.5, 100, rng),
                  std::domain_error);
}

TEST_CASE("correlation check is thread independent")
{
  EllipticalSpec spec;
  spec.mu = Eigen::Vector2d::Zero();
  spec.sigma = Eigen::Matrix2d::Identity();
  RandomStream a(2), b(2);
  auto one = correlation_preservation_check(spec, CharGenerator::gauss(), 0.3, 150000, a, 1);
  auto four = correlation_preservation_check(spec, CharGenerator::gauss(), 0.3, 150000, b, 4);
  CHECK(one.corr_z == four.corr_z);
  CHECK(one.tau_z == four.tau_z);
}
