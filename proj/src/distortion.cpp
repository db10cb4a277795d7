#include "smoothcop/distortion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smoothcop/errors.hpp"
#include "smoothcop/functionals.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/parallel.hpp"
#include "smoothcop/stats.hpp"

namespace smoothcop {

DistortionReport
relative_error_curve(const CharGenerator& gy, double c, std::span<const double> u_grid)
{
  if (!(c > 0.0))
    throw std::domain_error("relative_error_curve: c must be positive");
  DistortionReport report;
  report.u_grid.assign(u_grid.begin(), u_grid.end());
  report.rel_error.reserve(u_grid.size());
  for (double u : u_grid)
    report.rel_error.push_back(1.0 - gy(c * u));
  report.rate_exponent = fit_rate_exponent(gy);
  return report;
}

DistortionReport
relative_error_curve(const CharGenerator& gy,
                     double c,
                     std::span<const double> u_grid,
                     const Eigen::MatrixXd& sigma,
                     const Eigen::MatrixXd& t_vectors)
{
  auto report = relative_error_curve(gy, c, u_grid);
  if (sigma.rows() != sigma.cols() || t_vectors.cols() != sigma.rows())
    throw std::invalid_argument("relative_error_curve: t vectors must match sigma");
  for (Eigen::Index k = 0; k < t_vectors.rows(); ++k) {
    Eigen::VectorXd t = t_vectors.row(k).transpose();
    report.abs_bound.push_back(1.0 - gy(c * t.dot(sigma * t)));
  }
  return report;
}

double
fit_rate_exponent(const CharGenerator& gy, double u)
{
  std::vector<double> xs, ys;
  for (int k = 4; k <= 12; ++k) {
    double c = std::ldexp(1.0, -k);
    double err = 1.0 - gy(c * u);
    if (!(err > 0.0))
      throw std::domain_error("fit_rate_exponent: relative error vanished, no log-log fit");
    xs.push_back(std::log(c));
    ys.push_back(std::log(err));
  }
  double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

double
laplace_bound_value(double c, double sigma2, double M, double T)
{
  return std::log(c * sigma2 * T * T / 2.0 + 1.0) / std::numbers::pi + M / (std::numbers::pi * T);
}

LaplaceBound
laplace_uniform_bound(double c, double sigma2, double M)
{
  if (!(c > 0.0) || !(sigma2 > 0.0) || !(M > 0.0))
    throw std::domain_error("laplace_uniform_bound: inputs must be positive");
  const double cs = c * sigma2;
  const double a = cs * cs * cs * M * M * M + 108.0 * cs * cs * M +
                   6.0 * std::sqrt(6.0) *
                     std::sqrt(std::pow(cs, 5) * std::pow(M, 4) + 54.0 * std::pow(cs, 4) * M * M);
  const double a3 = std::cbrt(a);
  const double T = (cs * M * M / a3 + a3 / cs + M) / 6.0;
  const double t1 = cs * T * T * T, t2 = M * cs * T * T / 2.0;
  return { T, laplace_bound_value(c, sigma2, M, T), std::abs(t1 - t2 - M) / (t1 + t2 + M) };
}

double
laplace_default_M(double sigma2)
{
  if (!(sigma2 > 0.0))
    throw std::domain_error("laplace_default_M: sigma2 must be positive");
  return 24.0 / (std::sqrt(2.0) * std::sqrt(sigma2));
}

namespace {

SampleMatrix
chunked_sample(const EllipticalSpec& spec,
               std::size_t n,
               std::uint64_t base,
               std::size_t threads)
{
  constexpr std::size_t chunk = 1 << 16;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  SampleMatrix out(Eigen::Index(n), Eigen::Index(spec.dim()));
  parallel_for(chunks, threads, [&](std::size_t k) {
    auto rng = RandomStream::derive(base, k);
    std::size_t rows = std::min(chunk, n - k * chunk);
    out.middleRows(Eigen::Index(k * chunk), Eigen::Index(rows)) =
      sample_elliptical(spec, rows, rng);
  });
  return out;
}

} // namespace

CorrelationReport
correlation_preservation_check(const EllipticalSpec& spec,
                               const CharGenerator& kernel_gen,
                               double c,
                               std::size_t n_mc,
                               RandomStream& rng,
                               std::size_t threads)
{
  spec.validate();
  if (!(c >= 0.0))
    throw std::domain_error("correlation_preservation_check: c must be nonnegative");
  if (!spec.generator.finite_variance() || !kernel_gen.finite_variance())
    throw UnsupportedOperation("correlation_preservation_check: both generators need finite variance");
  if (spec.dim() < 2 || n_mc < 3)
    throw std::invalid_argument("correlation_preservation_check: need d >= 2 and n_mc >= 3");

  SampleMatrix x = chunked_sample(spec, n_mc, rng.next_u64(), threads);
  SampleMatrix z = x;
  std::uint64_t noise_seed = rng.next_u64();
  if (c > 0.0) {
    EllipticalSpec noise{ Eigen::VectorXd::Zero(Eigen::Index(spec.dim())), c * spec.sigma, kernel_gen };
    z += chunked_sample(noise, n_mc, noise_seed, threads);
  }

  CorrelationReport report;
  Eigen::MatrixXd cov_x = sample_covariance(x), cov_z = sample_covariance(z);
  report.corr_x = covariance_to_correlation(cov_x);
  report.corr_z = covariance_to_correlation(cov_z);
  report.max_corr_gap = (report.corr_x - report.corr_z).cwiseAbs().maxCoeff();
  report.inflation_observed = cov_z.trace() / cov_x.trace();
  report.inflation_theory = 1.0 + c * kernel_gen.deriv_at_zero() / spec.generator.deriv_at_zero();

  auto col = [](const SampleMatrix& m, Eigen::Index j) {
    return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
  };
  auto x0 = col(x, 0), x1 = col(x, 1), z0 = col(z, 0), z1 = col(z, 1);
  auto hx = kendall_influence(x0, x1);
  auto hz = kendall_influence(z0, z1);
  report.tau_x = mean(hx);
  report.tau_z = mean(hz);
  std::vector<double> diff(hx.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = hx[i] - hz[i];
  report.tau_diff_se = std::sqrt(4.0 * variance(diff) / double(diff.size()));
  return report;
}

} // namespace smoothcop
