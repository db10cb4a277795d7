#include "smoothcop/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace smoothcop {

double
norm_pdf(double x)
{
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double
norm_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double
norm_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("norm_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

// Gauss-Legendre abscissae/weights on (-1, 1), positive half.
constexpr std::array<double, 3> gl6_x{ 0.9324695142031522, 0.6612093864662647,
                                       0.2386191860831970 };
constexpr std::array<double, 3> gl6_w{ 0.1713244923791705, 0.3607615730481384,
                                       0.4679139345726904 };
constexpr std::array<double, 6> gl12_x{ 0.9815606342467191, 0.9041172563704750,
                                        0.7699026741943050, 0.5873179542866171,
                                        0.3678314989981802, 0.1252334085114692 };
constexpr std::array<double, 6> gl12_w{ 0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029 };
constexpr std::array<double, 10> gl20_x{
  0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
  0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
  0.2277858511416451, 0.07652652113349733
};
constexpr std::array<double, 10> gl20_w{
  0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
  0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
  0.1491729864726037,  0.1527533871307259
};

// Upper orthant probability P(X > dh, Y > dk).
double
bvn_upper(double dh, double dk, double r)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (dh == inf || dk == inf)
    return 0.0;
  if (dh == -inf)
    return dk == -inf ? 1.0 : norm_cdf(-dk);
  if (dk == -inf)
    return norm_cdf(-dh);
  if (r == 0.0)
    return norm_cdf(-dh) * norm_cdf(-dk);

  const double* xs;
  const double* ws;
  std::size_t lg;
  if (std::abs(r) < 0.3) {
    xs = gl6_x.data();
    ws = gl6_w.data();
    lg = gl6_x.size();
  } else if (std::abs(r) < 0.75) {
    xs = gl12_x.data();
    ws = gl12_w.data();
    lg = gl12_x.size();
  } else {
    xs = gl20_x.data();
    ws = gl20_w.data();
    lg = gl20_x.size();
  }

  constexpr double tp = 2.0 * std::numbers::pi;
  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    double hs = 0.5 * (h * h + k * k);
    double asr = 0.5 * std::asin(r);
    for (std::size_t i = 0; i < lg; ++i) {
      for (double sign : { -1.0, 1.0 }) {
        double sn = std::sin(asr * (1.0 + sign * xs[i]));
        bvn += ws[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return std::clamp(bvn * asr / tp + norm_cdf(-h) * norm_cdf(-k), 0.0, 1.0);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    double bs = (h - k) * (h - k);
    double asr = -0.5 * (bs / as + hk);
    double c = (4.0 - hk) / 8.0;
    double d = (12.0 - hk) / 80.0;
    if (asr > -100.0)
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
    if (hk > -100.0) {
      double b = std::sqrt(bs);
      double sp = std::sqrt(tp) * norm_cdf(-b / a);
      bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a *= 0.5;
    double acc = 0.0;
    for (std::size_t i = 0; i < lg; ++i) {
      for (double sign : { -1.0, 1.0 }) {
        double xi = a * (1.0 + sign * xs[i]);
        double xsq = xi * xi;
        double asr_i = -0.5 * (bs / xsq + hk);
        if (asr_i > -100.0) {
          double sp = 1.0 + c * xsq * (1.0 + 5.0 * d * xsq);
          double rs = std::sqrt(1.0 - xsq);
          double ep = std::exp(-0.5 * hk * xsq / ((1.0 + rs) * (1.0 + rs))) / rs;
          acc += ws[i] * std::exp(asr_i) * (sp - ep);
        }
      }
    }
    bvn = (a * acc - bvn) / tp;
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else if (h >= k) {
    bvn = -bvn;
  } else {
    double lower = h < 0.0 ? norm_cdf(k) - norm_cdf(h) : norm_cdf(-h) - norm_cdf(-k);
    bvn = lower - bvn;
  }
  return std::clamp(bvn, 0.0, 1.0);
}

} // namespace

double
bvn_cdf(double x, double y, double r)
{
  if (!(r >= -1.0 && r <= 1.0))
    throw std::domain_error("bvn_cdf: correlation outside [-1, 1]");
  return bvn_upper(-x, -y, r);
}

} // namespace smoothcop
