#include "smoothcop/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "smoothcop/io.hpp"

namespace smoothcop {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Memo keyed by u on a 1e-12 lattice; only used by generators whose
// evaluation needs quadrature.
class GeneratorMemo
{
public:
  template<class Fn>
  double lookup(double u, Fn&& compute)
  {
    if (u > 9.0e6)
      return compute(u);
    auto key = std::llround(u * 1e12);
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(key); it != values_.end())
        return it->second;
    }
    double value = compute(u);
    std::lock_guard lock(mutex_);
    if (values_.size() < max_entries)
      values_.emplace(key, value);
    return value;
  }

private:
  static constexpr std::size_t max_entries = 1 << 20;
  std::mutex mutex_;
  std::unordered_map<long long, double> values_;
};

// int_0^inf (1 + x^2)^-(alpha + 1/2) cos(t x) dx
double
fourier_cos_integral(double alpha, double t)
{
  if (t == 0.0)
    return 0.5 * std::sqrt(std::numbers::pi) *
           std::exp(std::lgamma(alpha) - std::lgamma(alpha + 0.5));
  thread_local boost::math::quadrature::ooura_fourier_cos<double> integrator(1e-11, 10);
  auto f = [alpha](double x) { return std::pow(1.0 + x * x, -(alpha + 0.5)); };
  return integrator.integrate(f, t).first;
}

bool
is_odd_integer(double nu)
{
  return nu >= 1.0 && nu == std::floor(nu) && std::fmod(nu, 2.0) == 1.0 && nu < 200.0;
}

// psi for odd nu = 2r + 1 via the half-integer Bessel series, written in
// powers of s so that small arguments stay finite.
double
student_t_half_integer(int r, double s)
{
  if (s == 0.0)
    return 1.0;
  double sum = 0.0;
  double coeff = 1.0; // (r+k)! / ((r-k)! k!)
  for (int k = 0; k <= r; ++k) {
    if (k > 0)
      coeff *= double(r + k) * double(r - k + 1) / double(k);
    sum += coeff * std::pow(2.0, -k) * std::pow(s, r - k);
  }
  double alpha = r + 0.5;
  double log_norm = 0.5 * std::log(std::numbers::pi / 2.0) - std::lgamma(alpha) -
                    (alpha - 1.0) * std::numbers::ln2;
  return std::exp(log_norm - s) * sum;
}

} // namespace

CharGenerator::CharGenerator(GeneratorFamily family,
                             double param,
                             std::string name,
                             std::function<double(double)> fn,
                             double deriv0)
  : family_(family)
  , param_(param)
  , name_(std::move(name))
  , fn_(std::move(fn))
  , deriv0_(deriv0)
{}

CharGenerator
CharGenerator::gauss()
{
  return { GeneratorFamily::gauss, 0.0, "gauss",
           [](double u) { return std::exp(-0.5 * u); }, -0.5 };
}

CharGenerator
CharGenerator::laplace()
{
  return { GeneratorFamily::laplace, 0.0, "laplace",
           [](double u) { return 1.0 / (1.0 + 0.5 * u); }, -0.5 };
}

CharGenerator
CharGenerator::cauchy()
{
  return { GeneratorFamily::cauchy, 1.0, "cauchy",
           [](double u) { return std::exp(-std::sqrt(u)); }, neg_inf };
}

CharGenerator
CharGenerator::student_t(double nu)
{
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::domain_error("student_t generator: nu must be positive");
  double deriv0 = nu > 2.0 ? -nu / (2.0 * nu - 4.0) : neg_inf;
  std::string name = "student_t:" + format_number(nu);
  if (is_odd_integer(nu)) {
    int r = int(nu - 1.0) / 2;
    return { GeneratorFamily::student_t, nu, name,
             [nu, r](double u) { return student_t_half_integer(r, std::sqrt(nu * u)); },
             deriv0 };
  }
  double alpha = 0.5 * nu;
  double norm = 2.0 * std::exp(std::lgamma(alpha + 0.5) - std::lgamma(alpha)) /
                std::sqrt(std::numbers::pi);
  auto memo = std::make_shared<GeneratorMemo>();
  auto fn = [nu, alpha, norm, memo](double u) {
    if (u == 0.0)
      return 1.0;
    return memo->lookup(u, [&](double v) {
      double value = norm * fourier_cos_integral(alpha, std::sqrt(nu * v));
      return std::clamp(value, 0.0, 1.0);
    });
  };
  return { GeneratorFamily::student_t, nu, name, fn, deriv0 };
}

CharGenerator
CharGenerator::stable(double alpha)
{
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("stable generator: alpha must lie in (0, 2]");
  double deriv0 = alpha == 2.0 ? -1.0 : neg_inf;
  return { GeneratorFamily::stable, alpha, "stable:" + format_number(alpha),
           [alpha](double u) { return std::exp(-std::pow(u, 0.5 * alpha)); }, deriv0 };
}

CharGenerator
CharGenerator::custom(std::string name, std::function<double(double)> fn, double deriv0)
{
  return { GeneratorFamily::composite, 0.0, std::move(name), std::move(fn), deriv0 };
}

CharGenerator
CharGenerator::parse(std::string_view text)
{
  auto parts = split(text, ':');
  const std::string& head = parts.front();
  if (parts.size() == 1) {
    if (head == "gauss")
      return gauss();
    if (head == "laplace")
      return laplace();
    if (head == "cauchy")
      return cauchy();
  } else if (parts.size() == 2) {
    if (head == "student_t")
      return student_t(parse_double(parts[1]));
    if (head == "stable")
      return stable(parse_double(parts[1]));
  }
  throw std::invalid_argument("unknown generator '" + std::string(text) + "'");
}

double
CharGenerator::operator()(double u) const
{
  if (!(u >= 0.0))
    throw std::domain_error("generator argument must be nonnegative");
  if (u == 0.0)
    return 1.0;
  return fn_(u);
}

bool
CharGenerator::finite_variance() const
{
  return std::isfinite(deriv0_);
}

CharGenerator
CharGenerator::rescaled(double scale) const
{
  if (!(scale > 0.0))
    throw std::domain_error("rescaled: scale must be positive");
  auto fn = fn_;
  return { GeneratorFamily::composite, 0.0,
           name_ + "*" + format_number(scale),
           [fn, scale](double u) { return u == 0.0 ? 1.0 : fn(scale * u); },
           scale * deriv0_ };
}

double
eval_generator(const CharGenerator& g, double u)
{
  return g(u);
}

double
bessel_k_half(int r, double t)
{
  if (r < 0)
    throw std::domain_error("bessel_k_half: r must be nonnegative");
  if (!(t > 0.0))
    throw std::domain_error("bessel_k_half: t must be positive");
  double sum = 0.0;
  double coeff = 1.0;
  for (int k = 0; k <= r; ++k) {
    if (k > 0)
      coeff *= double(r + k) * double(r - k + 1) / double(k);
    sum += coeff * std::pow(2.0 * t, -k);
  }
  return std::sqrt(std::numbers::pi / (2.0 * t)) * std::exp(-t) * sum;
}

double
bessel_k_integral(double alpha, double t)
{
  if (!(t > 0.0))
    throw std::domain_error("bessel_k_integral: t must be positive");
  if (!(alpha > -0.5))
    throw std::domain_error("bessel_k_integral: alpha must exceed -1/2");
  double log_pref = alpha * std::log(2.0 / t) + std::lgamma(alpha + 0.5) -
                    0.5 * std::log(std::numbers::pi);
  return std::exp(log_pref) * fourier_cos_integral(alpha, t);
}

CharGenerator
product_generator(const CharGenerator& gx, const CharGenerator& gy, double c)
{
  if (!(c > 0.0))
    throw std::domain_error("product_generator: c must be positive");
  double deriv0 = (gx.finite_variance() && gy.finite_variance())
                    ? gx.deriv_at_zero() + c * gy.deriv_at_zero()
                    : neg_inf;
  return CharGenerator::custom(
    gx.name() + "x" + gy.name(), [gx, gy, c](double u) { return gx(u) * gy(c * u); },
    deriv0);
}

ClosureDefect
closure_defect(const CharGenerator& g, double c, std::span<const double> grid)
{
  if (grid.empty())
    throw std::invalid_argument("closure_defect: empty grid");
  if (!(c > 0.0))
    throw std::domain_error("closure_defect: c must be positive");
  std::vector<double> target(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    target[k] = g(grid[k]) * g(c * grid[k]);

  auto max_abs = [&](double log_gamma) {
    double gamma = std::exp(log_gamma);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, std::abs(target[k] - g(gamma * grid[k])));
    return worst;
  };
  // every residual is nonnegative once gamma is large enough; the
  // objective is quasi-convex in gamma for monotone generators
  auto all_nonneg = [&](double log_gamma) {
    double gamma = std::exp(log_gamma);
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (target[k] - g(gamma * grid[k]) < 0.0)
        return false;
    return true;
  };
  double lo = -1.0;
  double hi = 1.0;
  while (!all_nonneg(hi) && hi < 64.0)
    hi *= 2.0;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = max_abs(x1), f2 = max_abs(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = max_abs(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = max_abs(x2);
    }
  }
  double best = f1 <= f2 ? x1 : x2;
  return { std::min(f1, f2), std::exp(best) };
}

} // namespace smoothcop
