#include "smoothcop/elliptical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "smoothcop/errors.hpp"

namespace smoothcop {

void
EllipticalSpec::validate() const
{
  if (mu.size() == 0)
    throw std::invalid_argument("elliptical spec: empty location");
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size())
    throw std::invalid_argument("elliptical spec: dispersion has wrong shape");
  if (!is_spd(sigma))
    throw std::invalid_argument("elliptical spec: dispersion must be SPD");
}

EllipticalSpec
EllipticalSpec::normalize() const
{
  validate();
  if (!generator.finite_variance())
    throw UnsupportedOperation("normalize: generator has no finite second moment");
  double k = -2.0 * generator.deriv_at_zero();
  return { mu, k * sigma, generator.rescaled(1.0 / k) };
}

std::complex<double>
characteristic_function(const EllipticalSpec& spec, const Eigen::VectorXd& t)
{
  double quad = t.dot(spec.sigma * t);
  return std::polar(spec.generator(std::max(quad, 0.0)), t.dot(spec.mu));
}

namespace {

double
laplace_radial_density(double x, std::size_t d)
{
  if (x < 0.0)
    return 0.0;
  double half = 0.5 * double(d);
  if (x == 0.0)
    return d == 1 ? std::numbers::sqrt2 : 0.0;
  double k = boost::math::cyl_bessel_k(std::abs(half - 1.0), x * std::numbers::sqrt2);
  if (k == 0.0)
    return 0.0;
  double log_f = std::numbers::ln2 + half * std::log(x) + std::log(k) -
                 (half - 1.0) * 0.5 * std::numbers::ln2 - std::lgamma(half);
  return std::exp(log_f);
}

// Tabulated CDF of the Laplace radial law, inverted by linear interpolation.
class LaplaceRadialTable
{
public:
  explicit LaplaceRadialTable(std::size_t d)
  {
    constexpr std::size_t cells = 4096;
    double x_max = 30.0 + 2.0 * double(d);
    x_.resize(cells + 1);
    cdf_.resize(cells + 1);
    auto f = [d](double x) { return laplace_radial_density(x, d); };
    for (std::size_t k = 0; k <= cells; ++k) {
      double s = double(k) / double(cells);
      x_[k] = x_max * s * s;
    }
    cdf_[0] = 0.0;
    for (std::size_t k = 1; k <= cells; ++k)
      cdf_[k] = cdf_[k - 1] +
                boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                  f, x_[k - 1], x_[k], 0);
    double total = cdf_.back();
    for (double& c : cdf_)
      c /= total;
  }

  double sample(double u) const
  {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
      return x_.back();
    auto k = std::size_t(it - cdf_.begin());
    double c0 = cdf_[k - 1], c1 = cdf_[k];
    double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return x_[k - 1] + frac * (x_[k] - x_[k - 1]);
  }

private:
  std::vector<double> x_;
  std::vector<double> cdf_;
};

const LaplaceRadialTable&
laplace_table(std::size_t d)
{
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<LaplaceRadialTable>> tables;
  std::lock_guard lock(mutex);
  auto& slot = tables[d];
  if (!slot)
    slot = std::make_unique<LaplaceRadialTable>(d);
  return *slot;
}

} // namespace

double
sample_radial(const CharGenerator& g, std::size_t d, RandomStream& rng)
{
  switch (g.family()) {
    case GeneratorFamily::gauss:
      return std::sqrt(rng.chi_squared(double(d)));
    case GeneratorFamily::cauchy:
    case GeneratorFamily::student_t: {
      double nu = g.parameter();
      double num = rng.chi_squared(double(d));
      double den = rng.chi_squared(nu) / nu;
      return std::sqrt(num / den);
    }
    case GeneratorFamily::laplace:
      return laplace_table(d).sample(rng.uniform());
    default:
      throw UnsupportedOperation("no radial sampler for generator " + g.name());
  }
}

SampleMatrix
sample_elliptical(const EllipticalSpec& spec, std::size_t n, RandomStream& rng)
{
  spec.validate();
  const auto d = Eigen::Index(spec.dim());
  Eigen::MatrixXd a = symmetric_sqrt(spec.sigma);
  SampleMatrix out(Eigen::Index(n), d);
  Eigen::VectorXd s(d);
  for (Eigen::Index i = 0; i < Eigen::Index(n); ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j)
        s(j) = rng.normal();
      norm = s.norm();
    } while (norm == 0.0);
    s /= norm;
    double r = sample_radial(spec.generator, spec.dim(), rng);
    out.row(i) = (spec.mu + r * (a * s)).transpose();
  }
  return out;
}

RadialDensity::RadialDensity(std::string family, std::function<double(double)> density)
  : family_(std::move(family))
  , density_(std::move(density))
{}

double
RadialDensity::integral() const
{
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(density_, 0.0, std::numeric_limits<double>::infinity(),
                              1e-12);
}

RadialDensity
laplace_radial(std::size_t d)
{
  if (d == 0)
    throw std::domain_error("laplace_radial: dimension must be positive");
  return { "laplace", [d](double x) { return laplace_radial_density(x, d); } };
}

RadialDensity
laplace_distorted_radial(double beta, std::size_t d)
{
  if (d == 0)
    throw std::domain_error("laplace_distorted_radial: dimension must be positive");
  if (!(beta > 0.0))
    throw std::domain_error("laplace_distorted_radial: beta must be positive");
  if (beta == 1.0)
    throw std::domain_error("laplace_distorted_radial: beta = 1 is singular");
  double root = std::sqrt(beta);
  return { "laplace_distorted", [=](double x) {
            return (laplace_radial_density(x, d) - root * laplace_radial_density(x / root, d)) /
                   (1.0 - beta);
          } };
}

} // namespace smoothcop
