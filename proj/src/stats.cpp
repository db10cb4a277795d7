#include "smoothcop/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace smoothcop {

std::vector<double>
average_ranks(std::span<const double> x)
{
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]])
      ++j;
    double avg = 0.5 * double(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double
mean(std::span<const double> x)
{
  if (x.empty())
    throw std::invalid_argument("mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
}

double
variance(std::span<const double> x)
{
  if (x.size() < 2)
    throw std::invalid_argument("variance: need at least two values");
  double m = mean(x);
  double ss = 0.0;
  for (double v : x)
    ss += (v - m) * (v - m);
  return ss / double(x.size() - 1);
}

double
standard_error(std::span<const double> x)
{
  return std::sqrt(variance(x) / double(x.size()));
}

double
quantile(std::vector<double> x, double p)
{
  std::erase_if(x, [](double v) { return std::isnan(v); });
  if (x.empty())
    return std::numeric_limits<double>::quiet_NaN();
  std::sort(x.begin(), x.end());
  double pos = p * double(x.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, x.size() - 1);
  double frac = pos - double(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

double
median(std::vector<double> x)
{
  return quantile(std::move(x), 0.5);
}

double
kolmogorov_survival(double lambda)
{
  if (lambda <= 0.0)
    return 1.0;
  if (lambda < 1.18) {
    // small-argument theta-function form
    double s = 0.0;
    double f = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    for (int k = 1; k <= 9; k += 2)
      s += std::exp(f * k * k);
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17)
      break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult
ks_test_uniform(std::span<const double> x)
{
  if (x.empty())
    throw std::invalid_argument("ks_test_uniform: empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double u = std::clamp(s[i], 0.0, 1.0);
    d = std::max({ d, double(i + 1) / n - u, u - double(i) / n });
  }
  double sn = std::sqrt(n);
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return { d, kolmogorov_survival(lambda) };
}

} // namespace smoothcop
