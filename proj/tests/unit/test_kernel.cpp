#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "smoothcop/copula.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/kernel.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/normal.hpp"

using namespace smoothcop;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double pi = std::numbers::pi;

double
phi(double z)
{
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
}

double
Phi(double z)
{
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Bivariate normal CDF through Plackett's correlation integral.
double
plackett_bvn(double x, double y, double rho)
{
  auto integrand = [&](double r) {
    double q = 1.0 - r * r;
    return std::exp(-(x * x - 2.0 * r * x * y + y * y) / (2.0 * q)) / std::sqrt(q);
  };
  double area = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, rho, 15, 1e-13);
  return Phi(x) * Phi(y) + area / (2.0 * pi);
}

SampleMatrix
column_data(std::initializer_list<double> values)
{
  SampleMatrix x(Eigen::Index(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values)
    x(i++, 0) = v;
  return x;
}

BandwidthMatrix
scalar_h(double h)
{
  return BandwidthMatrix::Constant(1, 1, h);
}

SmoothedModel
toy_model_2d(KernelSpec kernel = KernelSpec::gauss())
{
  SampleMatrix x(3, 2);
  x << 0.0, 0.0, 1.0, 0.5, -0.5, 1.5;
  Eigen::Matrix2d h;
  h << 0.4, 0.15, 0.15, 0.3;
  return SmoothedModel(x, kernel, h);
}

} // namespace

TEST_CASE("kernel density reference values")
{
  SmoothedModel origin(SampleMatrix::Zero(1, 2), KernelSpec::gauss(), Eigen::Matrix2d::Identity());
  std::array<double, 2> zero{ 0.0, 0.0 };
  CHECK_THAT(kde_density(origin, zero), WithinRel(1.0 / (2.0 * pi), 1e-14));
  SmoothedModel pair(column_data({ -1.0, 1.0 }), KernelSpec::gauss(), scalar_h(1.0));
  std::array<double, 1> x0{ 0.0 };
  CHECK_THAT(kde_density(pair, x0), WithinAbs(0.241970724519, 1e-12));
}

TEST_CASE("kernel density integrates to one")
{
  using boost::math::quadrature::gauss_kronrod;
  for (auto kernel : { KernelSpec::gauss(), KernelSpec::laplace() }) {
    auto model = toy_model_2d(kernel);
    // limits are offset so no node hits a data point, where the 2-D Laplace density is infinite
    auto inner = [&](double x) {
      return gauss_kronrod<double, 31>::integrate(
        [&](double y) {
          std::array<double, 2> p{ x, y };
          return kde_density(model, p);
        },
        -15.0, 15.0 + std::numbers::sqrt2 / 10.0, 12, 1e-10);
    };
    double total = gauss_kronrod<double, 31>::integrate(inner, -15.0 - std::numbers::pi / 10.0, 15.0, 12, 1e-9);
    INFO(kernel.name());
    CHECK_THAT(total, WithinAbs(1.0, 1e-4));
  }
}

TEST_CASE("kernel CDF limits and symmetric points")
{
  auto model = toy_model_2d();
  std::array<double, 2> hi{ inf, inf }, lo{ -inf, -inf };
  CHECK_THAT(kde_cdf(model, hi), WithinAbs(1.0, 1e-15));
  CHECK_THAT(kde_cdf(model, lo), WithinAbs(0.0, 1e-15));
  SmoothedModel single(column_data({ 0.0 }), KernelSpec::gauss(), scalar_h(1.0));
  std::array<double, 1> x0{ 0.0 };
  CHECK_THAT(kde_cdf(single, x0), WithinAbs(0.5, 1e-15));
  SmoothedModel origin(SampleMatrix::Zero(1, 2), KernelSpec::gauss(), Eigen::Matrix2d::Identity());
  std::array<double, 2> zero{ 0.0, 0.0 };
  CHECK_THAT(kde_cdf(origin, zero), WithinAbs(0.25, 1e-15));
}

TEST_CASE("full-bandwidth kernel CDF against Plackett's integral")
{
  auto model = toy_model_2d();
  const auto& h = model.bandwidth();
  double s1 = std::sqrt(h(0, 0)), s2 = std::sqrt(h(1, 1)), r = h(0, 1) / (s1 * s2);
  for (auto [x, y] : { std::pair{ 0.2, 0.3 }, { -1.0, 2.0 }, { 1.5, 0.1 } }) {
    double expected = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i)
      expected += plackett_bvn((x - model.data()(i, 0)) / s1, (y - model.data()(i, 1)) / s2, r) / 3.0;
    std::array<double, 2> p{ x, y };
    CHECK_THAT(kde_cdf(model, p), WithinAbs(expected, 1e-10));
  }
}

TEST_CASE("kernel CDF is monotone along each axis")
{
  auto model = toy_model_2d();
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) {
      double x = -3.0 + 0.3 * a, y = -3.0 + 0.3 * b;
      std::array<double, 2> p{ x, y }, px{ x + 0.3, y }, py{ x, y + 0.3 };
      CHECK(kde_cdf(model, px) >= kde_cdf(model, p));
      CHECK(kde_cdf(model, py) >= kde_cdf(model, p));
    }
}

TEST_CASE("one-dimensional CDF differentiates to the density")
{
  for (auto kernel : { KernelSpec::gauss(), KernelSpec::laplace() }) {
    SmoothedModel model(column_data({ -0.3, 0.4, 2.0 }), kernel, scalar_h(0.5));
    const double step = 1e-4;
    for (double x : { -1.0, 0.1, 0.9, 3.0 }) {
      std::array<double, 1> up{ x + step }, down{ x - step }, mid{ x };
      double slope = (kde_cdf(model, up) - kde_cdf(model, down)) / (2.0 * step);
      CHECK_THAT(slope, WithinAbs(kde_density(model, mid), 1e-5));
    }
  }
}

TEST_CASE("marginal CDF reference values")
{
  SmoothedModel single(column_data({ 5.0 }), KernelSpec::gauss(), scalar_h(4.0));
  CHECK_THAT(marginal_cdf(single, 0, 5.0), WithinAbs(0.5, 1e-15));
  CHECK(marginal_cdf(single, 0, inf) == 1.0);
  SmoothedModel pair(column_data({ 0.0, 2.0 }), KernelSpec::gauss(), scalar_h(1.0));
  CHECK_THAT(marginal_cdf(pair, 0, 0.0), WithinAbs((Phi(0.0) + Phi(-2.0)) / 2.0, 1e-15));
  CHECK_THAT(marginal_cdf(pair, 0, 0.0), WithinAbs(0.261375, 1e-6));
  CHECK_THAT(marginal_pdf(pair, 0, 1.0), WithinAbs(phi(1.0), 1e-15));
}

TEST_CASE("laplace kernel margin is the unit-variance Laplace law")
{
  auto kernel = KernelSpec::laplace();
  for (double z : { -2.0, -0.3, 0.0, 0.7, 3.0 }) {
    double expected = z < 0 ? 0.5 * std::exp(std::sqrt(2.0) * z) : 1.0 - 0.5 * std::exp(-std::sqrt(2.0) * z);
    CHECK_THAT(kernel.marginal_cdf(z), WithinAbs(expected, 1e-15));
    CHECK_THAT(kernel.marginal_pdf(z), WithinAbs(std::exp(-std::sqrt(2.0) * std::abs(z)) / std::sqrt(2.0), 1e-15));
  }
}

TEST_CASE("marginal CDF equals the joint CDF with the other coordinate unbounded")
{
  auto model = toy_model_2d();
  for (double x : { -1.0, 0.3, 1.7 }) {
    std::array<double, 2> p{ x, inf }, q{ inf, x };
    CHECK_THAT(kde_cdf(model, p), WithinAbs(marginal_cdf(model, 0, x), 1e-14));
    CHECK_THAT(kde_cdf(model, q), WithinAbs(marginal_cdf(model, 1, x), 1e-14));
  }
}

TEST_CASE("marginal quantile inverts the marginal CDF")
{
  SmoothedModel single(column_data({ 5.0 }), KernelSpec::gauss(), scalar_h(4.0));
  CHECK_THAT(marginal_quantile(single, 0, 0.5), WithinAbs(5.0, 1e-9));
  SmoothedModel pair(column_data({ 0.0, 2.0 }), KernelSpec::gauss(), scalar_h(1.0));
  CHECK_THAT(marginal_quantile(pair, 0, (Phi(0.0) + Phi(-2.0)) / 2.0), WithinAbs(0.0, 1e-8));
  auto model = toy_model_2d(KernelSpec::laplace());
  for (std::size_t j = 0; j < 2; ++j)
    for (double p : { 1e-6, 0.01, 0.5, 0.99, 1.0 - 1e-6 })
      CHECK_THAT(marginal_cdf(model, j, marginal_quantile(model, j, p)), WithinAbs(p, 1e-10));
  CHECK_THROWS_AS(marginal_quantile(model, 0, 0.0), std::domain_error);
  CHECK_THROWS_AS(marginal_quantile(model, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(marginal_quantile(model, 2, 0.5), std::out_of_range);
}

TEST_CASE("quantile tables give the same answers as fresh solves")
{
  auto a = toy_model_2d();
  a.prepare_quantile_tables();
  auto b = toy_model_2d();
  for (double p : { 0.001, 0.2, 0.77, 0.999 })
    CHECK_THAT(marginal_quantile(a, 1, p), WithinAbs(marginal_quantile(b, 1, p), 1e-9));
}

TEST_CASE("bandwidth root squares back to the bandwidth")
{
  auto model = toy_model_2d();
  CHECK((model.bandwidth_sqrt() * model.bandwidth_sqrt() - model.bandwidth()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THAT(model.marginal_bandwidth(0), WithinAbs(std::sqrt(0.4), 1e-15));
}

TEST_CASE("smoothed copula")
{
  SmoothedModel origin(SampleMatrix::Zero(1, 2), KernelSpec::gauss(), Eigen::Matrix2d::Identity());
  std::array<double, 2> half{ 0.5, 0.5 };
  CHECK_THAT(smoothed_copula_eval(origin, half), WithinAbs(0.25, 1e-10));
  auto model = toy_model_2d();
  for (double u : { 0.1, 0.45, 0.9 }) {
    std::array<double, 2> a{ u, 1.0 }, b{ 1.0, u };
    CHECK_THAT(smoothed_copula_eval(model, a), WithinAbs(u, 1e-8));
    CHECK_THAT(smoothed_copula_eval(model, b), WithinAbs(u, 1e-8));
  }
  std::array<double, 2> near_one{ 1.0 - 1e-9, 1.0 - 1e-9 }, grounded{ 0.0, 0.6 };
  CHECK_THAT(smoothed_copula_eval(model, near_one), WithinAbs(1.0, 1e-8));
  CHECK(smoothed_copula_eval(model, grounded) == 0.0);
}

TEST_CASE("bandwidth validation")
{
  SampleMatrix x = SampleMatrix::Zero(2, 2);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(SmoothedModel(x, KernelSpec::gauss(), asym), std::invalid_argument);
  Eigen::Matrix2d indefinite;
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(SmoothedModel(x, KernelSpec::gauss(), indefinite), std::invalid_argument);
  Eigen::Matrix2d singular;
  singular << 1.0, 1.0, 1.0, 1.0;
  SmoothedModel psd(x, KernelSpec::gauss(), singular);
  std::array<double, 2> p{ 0.0, 0.0 };
  CHECK_THROWS_AS(kde_density(psd, p), std::invalid_argument);
  CHECK_THAT(marginal_cdf(psd, 0, 0.0), WithinAbs(0.5, 1e-15));
}

TEST_CASE("laplace joint CDF in two dimensions is unsupported")
{
  auto model = toy_model_2d(KernelSpec::laplace());
  std::array<double, 2> p{ 0.0, 0.0 };
  CHECK_THROWS_AS(kde_cdf(model, p), UnsupportedOperation);
}
