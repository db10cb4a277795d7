#include "smoothcop/copula.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "smoothcop/elliptical.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/io.hpp"
#include "smoothcop/normal.hpp"
#include "smoothcop/stats.hpp"

namespace smoothcop {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using boost::math::quadrature::gauss_kronrod;

Eigen::MatrixXd
equicorrelation(double rho, std::size_t dim)
{
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(Eigen::Index(dim), Eigen::Index(dim), rho);
  r.diagonal().setOnes();
  return r;
}

double
student_t_cdf(double nu, double x)
{
  if (std::isinf(x))
    return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

// Bivariate elliptical copula CDF by integrating the conditional law of the
// second coordinate against the density of the first.
double
gaussian_copula_cdf2(double rho, double u, double v)
{
  double a = norm_quantile(u);
  double b = norm_quantile(v);
  double sd = std::sqrt(1.0 - rho * rho);
  auto f = [&](double s) { return norm_pdf(s) * norm_cdf((b - rho * s) / sd); };
  return gauss_kronrod<double, 61>::integrate(f, -inf, a, 15, 1e-12);
}

double
t_copula_cdf2(double rho, double nu, double u, double v)
{
  boost::math::students_t_distribution<double> marg(nu);
  double a = boost::math::quantile(marg, u);
  double b = boost::math::quantile(marg, v);
  double one_minus = 1.0 - rho * rho;
  auto f = [&](double s) {
    double scale = std::sqrt(one_minus * (nu + s * s) / (nu + 1.0));
    return boost::math::pdf(marg, s) * student_t_cdf(nu + 1.0, (b - rho * s) / scale);
  };
  return gauss_kronrod<double, 61>::integrate(f, -inf, a, 15, 1e-12);
}

double
sample_sibuya(double alpha, RandomStream& rng)
{
  double u = rng.uniform();
  if (u <= alpha)
    return 1.0;
  double tail = 1.0 - u;
  double log_tail = std::log(tail);
  double lg = std::lgamma(1.0 - alpha);
  // survival P(V > k) = Gamma(k + 1 - alpha) / (Gamma(k + 1) Gamma(1 - alpha))
  auto log_survival = [&](double k) {
    return std::lgamma(k + 1.0 - alpha) - std::lgamma(k + 1.0) - lg;
  };
  double guess = std::pow(tail * std::tgamma(1.0 - alpha), -1.0 / alpha);
  if (guess > 1e15)
    return std::floor(guess);
  double lo = 1.0;
  double hi = std::max(2.0, std::ceil(2.0 * guess));
  while (log_survival(hi) > log_tail)
    hi *= 2.0;
  // smallest integer k in (lo, hi] with survival(k) <= tail
  while (hi - lo > 1.0) {
    double mid = std::floor(0.5 * (lo + hi));
    if (log_survival(mid) <= log_tail)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double
positive_stable(double alpha, RandomStream& rng)
{
  double theta = std::numbers::pi * rng.uniform();
  double w = rng.exponential();
  return std::sin(alpha * theta) / std::pow(std::sin(theta), 1.0 / alpha) *
         std::pow(std::sin((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
}

void
require_unit_point(std::span<const double> u, std::size_t dim)
{
  if (u.size() != dim)
    throw std::invalid_argument("copula_cdf: point has wrong dimension");
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::domain_error("copula_cdf: point outside the unit cube");
}

} // namespace

CopulaSpec
CopulaSpec::clayton(double theta, std::size_t dim)
{
  CopulaSpec s{ CopulaFamily::clayton, theta, 0.0, 0.0, dim };
  s.validate();
  return s;
}

CopulaSpec
CopulaSpec::gumbel(double theta, std::size_t dim)
{
  CopulaSpec s{ CopulaFamily::gumbel, theta, 0.0, 0.0, dim };
  s.validate();
  return s;
}

CopulaSpec
CopulaSpec::joe(double theta, std::size_t dim)
{
  CopulaSpec s{ CopulaFamily::joe, theta, 0.0, 0.0, dim };
  s.validate();
  return s;
}

CopulaSpec
CopulaSpec::gaussian(double rho, std::size_t dim)
{
  CopulaSpec s{ CopulaFamily::gaussian, 0.0, rho, 0.0, dim };
  s.validate();
  return s;
}

CopulaSpec
CopulaSpec::student_t(double rho, double nu, std::size_t dim)
{
  CopulaSpec s{ CopulaFamily::student_t, 0.0, rho, nu, dim };
  s.validate();
  return s;
}

CopulaSpec
CopulaSpec::independence(std::size_t dim)
{
  CopulaSpec s{ CopulaFamily::independence, 0.0, 0.0, 0.0, dim };
  s.validate();
  return s;
}

CopulaSpec
CopulaSpec::parse(std::string_view text, std::size_t dim)
{
  auto parts = split(text, ':');
  const std::string& head = parts.front();
  if (parts.size() == 1 && (head == "indep" || head == "independence"))
    return independence(dim);
  if (parts.size() == 2) {
    if (head == "clayton")
      return clayton(parse_double(parts[1]), dim);
    if (head == "gumbel")
      return gumbel(parse_double(parts[1]), dim);
    if (head == "joe")
      return joe(parse_double(parts[1]), dim);
    if (head == "gaussian")
      return gaussian(parse_double(parts[1]), dim);
    if (head == "t") {
      auto params = split(parts[1], ',');
      if (params.size() == 2)
        return student_t(parse_double(params[0]), parse_double(params[1]), dim);
    }
  }
  throw std::invalid_argument("unknown copula '" + std::string(text) + "'");
}

void
CopulaSpec::validate() const
{
  if (dim < 2)
    throw std::invalid_argument("copula dimension must be at least 2");
  switch (family) {
    case CopulaFamily::clayton:
      if (dim == 2 ? !(theta > -1.0 && theta != 0.0) : !(theta > 0.0))
        throw std::invalid_argument("clayton: theta must be positive (or in (-1, 0) when bivariate)");
      break;
    case CopulaFamily::gumbel:
    case CopulaFamily::joe:
      if (!(theta >= 1.0))
        throw std::invalid_argument(family_name() + ": theta must be at least 1");
      break;
    case CopulaFamily::student_t:
      if (!(nu > 0.0))
        throw std::invalid_argument("t copula: nu must be positive");
      [[fallthrough]];
    case CopulaFamily::gaussian:
      if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("elliptical copula: |rho| must be below 1");
      if (!(rho > -1.0 / double(dim - 1)))
        throw std::invalid_argument("elliptical copula: equicorrelation not positive definite");
      break;
    case CopulaFamily::independence:
      break;
  }
}

std::string
CopulaSpec::family_name() const
{
  switch (family) {
    case CopulaFamily::clayton:
      return "clayton";
    case CopulaFamily::gumbel:
      return "gumbel";
    case CopulaFamily::joe:
      return "joe";
    case CopulaFamily::gaussian:
      return "gaussian";
    case CopulaFamily::student_t:
      return "t";
    case CopulaFamily::independence:
      return "indep";
  }
  return "unknown";
}

std::string
CopulaSpec::parameter_label() const
{
  switch (family) {
    case CopulaFamily::clayton:
    case CopulaFamily::gumbel:
    case CopulaFamily::joe:
      return format_number(theta);
    case CopulaFamily::gaussian:
      return format_number(rho);
    case CopulaFamily::student_t:
      return format_number(rho) + ";" + format_number(nu);
    case CopulaFamily::independence:
      return "";
  }
  return "";
}

std::string
CopulaSpec::label() const
{
  auto p = parameter_label();
  return p.empty() ? family_name() : family_name() + ":" + p;
}

double
clayton_theta_from_tau(double tau)
{
  if (!(tau > -1.0 && tau < 1.0) || tau == 0.0)
    throw std::domain_error("clayton_theta_from_tau: tau must lie in (-1, 1) \\ {0}");
  return 2.0 * tau / (1.0 - tau);
}

double
copula_cdf(const CopulaSpec& spec, std::span<const double> u)
{
  require_unit_point(u, spec.dim);
  if (std::any_of(u.begin(), u.end(), [](double x) { return x == 0.0; }))
    return 0.0;
  const double d = double(u.size());
  switch (spec.family) {
    case CopulaFamily::independence: {
      double p = 1.0;
      for (double x : u)
        p *= x;
      return p;
    }
    case CopulaFamily::clayton: {
      double s = 0.0;
      for (double x : u)
        s += std::pow(x, -spec.theta);
      double base = s - d + 1.0;
      if (spec.theta < 0.0)
        base = std::max(base, 0.0);
      return std::pow(base, -1.0 / spec.theta);
    }
    case CopulaFamily::gumbel: {
      double s = 0.0;
      for (double x : u)
        s += std::pow(-std::log(x), spec.theta);
      return std::exp(-std::pow(s, 1.0 / spec.theta));
    }
    case CopulaFamily::joe: {
      double log_prod = 0.0;
      for (double x : u)
        log_prod += std::log1p(-std::pow(1.0 - x, spec.theta));
      return 1.0 - std::pow(-std::expm1(log_prod), 1.0 / spec.theta);
    }
    case CopulaFamily::gaussian:
    case CopulaFamily::student_t: {
      if (spec.dim != 2)
        throw UnsupportedOperation("elliptical copula CDF implemented for dim = 2 only");
      double a = u[0], b = u[1];
      if (a == 1.0)
        return b;
      if (b == 1.0)
        return a;
      double value = spec.family == CopulaFamily::gaussian
                       ? gaussian_copula_cdf2(spec.rho, a, b)
                       : t_copula_cdf2(spec.rho, spec.nu, a, b);
      return std::clamp(value, 0.0, std::min(a, b));
    }
  }
  return 0.0;
}

SampleMatrix
sample_copula(const CopulaSpec& spec, std::size_t n, RandomStream& rng)
{
  spec.validate();
  const auto d = Eigen::Index(spec.dim);
  const auto rows = Eigen::Index(n);
  SampleMatrix u(rows, d);
  switch (spec.family) {
    case CopulaFamily::independence:
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          u(i, j) = rng.uniform();
      break;
    case CopulaFamily::clayton:
      if (spec.theta > 0.0) {
        for (Eigen::Index i = 0; i < rows; ++i) {
          double v = rng.gamma(1.0 / spec.theta);
          for (Eigen::Index j = 0; j < d; ++j)
            u(i, j) = std::pow(1.0 + rng.exponential() / v, -1.0 / spec.theta);
        }
      } else {
        // conditional inversion of dC/du for the negative branch
        const double th = spec.theta;
        for (Eigen::Index i = 0; i < rows; ++i) {
          double a = rng.uniform();
          double w = rng.uniform();
          double base = (std::pow(w, -th / (1.0 + th)) - 1.0) * std::pow(a, -th) + 1.0;
          u(i, 0) = a;
          u(i, 1) = std::pow(std::max(base, 0.0), -1.0 / th);
        }
      }
      break;
    case CopulaFamily::gumbel: {
      const double alpha = 1.0 / spec.theta;
      for (Eigen::Index i = 0; i < rows; ++i) {
        double v = spec.theta == 1.0 ? 1.0 : positive_stable(alpha, rng);
        for (Eigen::Index j = 0; j < d; ++j)
          u(i, j) = std::exp(-std::pow(rng.exponential() / v, alpha));
      }
      break;
    }
    case CopulaFamily::joe: {
      const double alpha = 1.0 / spec.theta;
      for (Eigen::Index i = 0; i < rows; ++i) {
        double v = sample_sibuya(alpha, rng);
        for (Eigen::Index j = 0; j < d; ++j) {
          double s = rng.exponential() / v;
          u(i, j) = 1.0 - std::pow(-std::expm1(-s), alpha);
        }
      }
      break;
    }
    case CopulaFamily::gaussian: {
      EllipticalSpec es{ Eigen::VectorXd::Zero(d), equicorrelation(spec.rho, spec.dim),
                         CharGenerator::gauss() };
      SampleMatrix x = sample_elliptical(es, n, rng);
      u = x.unaryExpr([](double z) { return norm_cdf(z); });
      break;
    }
    case CopulaFamily::student_t: {
      EllipticalSpec es{ Eigen::VectorXd::Zero(d), equicorrelation(spec.rho, spec.dim),
                         CharGenerator::student_t(spec.nu) };
      SampleMatrix x = sample_elliptical(es, n, rng);
      const double nu = spec.nu;
      u = x.unaryExpr([nu](double z) { return student_t_cdf(nu, z); });
      break;
    }
  }
  return u;
}

double
true_tau(const CopulaSpec& spec)
{
  spec.validate();
  switch (spec.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::clayton:
      return spec.theta / (spec.theta + 2.0);
    case CopulaFamily::gumbel:
      return 1.0 - 1.0 / spec.theta;
    case CopulaFamily::gaussian:
    case CopulaFamily::student_t:
      return 2.0 / std::numbers::pi * std::asin(spec.rho);
    case CopulaFamily::joe: {
      const double th = spec.theta;
      // phi(t) / phi'(t) for phi(t) = -log(1 - (1 - t)^theta)
      auto ratio = [th](double t) {
        double s = 1.0 - t;
        if (s <= 0.0)
          return 0.0;
        double w = std::pow(s, th);
        if (w >= 1.0)
          return 0.0; // (1 - w) log(1 - w) -> 0
        return std::log1p(-w) * (1.0 - w) / (th * std::pow(s, th - 1.0));
      };
      boost::math::quadrature::tanh_sinh<double> integrator;
      return 1.0 + 4.0 * integrator.integrate(ratio, 0.0, 1.0, 1e-10);
    }
  }
  return 0.0;
}

double
true_rho_s(const CopulaSpec& spec)
{
  spec.validate();
  if (spec.dim != 2)
    throw UnsupportedOperation("true_rho_s: bivariate copulas only");
  switch (spec.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gaussian:
      return 6.0 / std::numbers::pi * std::asin(0.5 * spec.rho);
    default:
      break;
  }
  auto inner = [&](double a) {
    auto f = [&](double b) {
      std::array<double, 2> p{ a, b };
      return copula_cdf(spec, p);
    };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 12, 1e-10);
  };
  double integral = gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 12, 1e-9);
  return 12.0 * integral - 3.0;
}

PolygonChain
clayton_level_boundary(double theta, double t, std::size_t n_pts)
{
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("clayton_level_boundary: t must lie in (0, 1)");
  if (!(theta > -1.0) || theta == 0.0)
    throw std::invalid_argument("clayton_level_boundary: theta must be in (-1, inf) \\ {0}");
  if (n_pts < 2)
    throw std::invalid_argument("clayton_level_boundary: need at least two points");
  PolygonChain chain;
  chain.vertices.reserve(n_pts);
  const double t_pow = std::pow(t, -theta);
  for (std::size_t k = 0; k < n_pts; ++k) {
    double u = t + (1.0 - t) * double(k) / double(n_pts - 1);
    double v;
    if (k == 0)
      v = 1.0;
    else if (k + 1 == n_pts)
      u = 1.0, v = t;
    else
      v = std::min(1.0, std::pow(std::max(t_pow - std::pow(u, -theta) + 1.0, 0.0),
                                 -1.0 / theta));
    chain.vertices.push_back({ u, v });
  }
  return chain;
}

SampleMatrix
pseudo_observations(const SampleMatrix& x)
{
  SampleMatrix u(x.rows(), x.cols());
  const double denom = double(x.rows() + 1);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd col = x.col(j);
    auto ranks = average_ranks(std::span<const double>(col.data(), std::size_t(col.size())));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      u(i, j) = ranks[std::size_t(i)] / denom;
  }
  return u;
}

EmpiricalCopula::EmpiricalCopula(const SampleMatrix& data)
  : pseudo_obs_(pseudo_observations(data))
{
  if (data.rows() == 0)
    throw std::invalid_argument("EmpiricalCopula: empty sample");
}

EmpiricalCopula
EmpiricalCopula::from_pseudo_observations(SampleMatrix pseudo_obs)
{
  if (pseudo_obs.rows() == 0)
    throw std::invalid_argument("EmpiricalCopula: empty sample");
  EmpiricalCopula ec;
  ec.pseudo_obs_ = std::move(pseudo_obs);
  return ec;
}

double
EmpiricalCopula::operator()(std::span<const double> u) const
{
  if (u.size() != dim())
    throw std::invalid_argument("EmpiricalCopula: point has wrong dimension");
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < pseudo_obs_.rows(); ++i) {
    bool below = true;
    for (Eigen::Index j = 0; j < pseudo_obs_.cols() && below; ++j)
      below = pseudo_obs_(i, j) <= u[std::size_t(j)];
    count += below;
  }
  return double(count) / double(size());
}

Eigen::MatrixXd
EmpiricalCopula::grid_values(std::span<const double> g) const
{
  if (dim() != 2)
    throw UnsupportedOperation("grid_values: bivariate copulas only");
  const auto size_g = Eigen::Index(g.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(size_g, size_g);
  auto first_at_or_above = [&](double x) {
    return Eigen::Index(std::lower_bound(g.begin(), g.end(), x) - g.begin());
  };
  for (Eigen::Index i = 0; i < pseudo_obs_.rows(); ++i) {
    Eigen::Index a = first_at_or_above(pseudo_obs_(i, 0));
    Eigen::Index b = first_at_or_above(pseudo_obs_(i, 1));
    if (a < size_g && b < size_g)
      counts(a, b) += 1.0;
  }
  for (Eigen::Index a = 0; a < size_g; ++a)
    for (Eigen::Index b = 0; b < size_g; ++b) {
      if (a > 0)
        counts(a, b) += counts(a - 1, b);
      if (b > 0)
        counts(a, b) += counts(a, b - 1);
      if (a > 0 && b > 0)
        counts(a, b) -= counts(a - 1, b - 1);
    }
  return counts / double(size());
}

double
empirical_copula_eval(const EmpiricalCopula& ec, std::span<const double> u)
{
  return ec(u);
}

} // namespace smoothcop
