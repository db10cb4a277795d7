#include "smoothcop/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smoothcop/errors.hpp"
#include "smoothcop/normal.hpp"
#include "smoothcop/parallel.hpp"
#include "smoothcop/stats.hpp"

namespace smoothcop {

double
WeightFunction::operator()(std::span<const double> x) const
{
  if (x.size() != std::size_t(center.size()))
    throw std::invalid_argument("WeightFunction: point has wrong dimension");
  double r2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    r2 += (x[j] - center(Eigen::Index(j))) * (x[j] - center(Eigen::Index(j)));
  return std::exp(-r2);
}

double
WeightFunction::integral() const
{
  return std::pow(std::numbers::pi, 0.5 * double(center.size()));
}

HermiteRule1d
gauss_hermite_1d(int order)
{
  if (order < 1)
    throw std::invalid_argument("gauss_hermite_1d: order must be positive");
  const auto n = Eigen::Index(order);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k)
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);

  HermiteRule1d rule;
  rule.nodes.resize(std::size_t(order));
  rule.weights.resize(std::size_t(order));
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  for (Eigen::Index k = 0; k < n; ++k) {
    double z = eig.eigenvalues()(k);
    double derivative = 0.0;
    // Newton polish on the orthonormal Hermite recurrence
    for (int it = 0; it < 3; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(double(j - 1) / j) * p3;
      }
      derivative = std::sqrt(2.0 * order) * p2;
      z -= p1 / derivative;
    }
    rule.nodes[std::size_t(k)] = z;
    rule.weights[std::size_t(k)] = 2.0 / (derivative * derivative);
  }
  return rule;
}

QuadratureRule
QuadratureRule::gauss_hermite(int order, std::size_t dim)
{
  if (dim < 1)
    throw std::invalid_argument("gauss_hermite: dimension must be positive");
  auto base = gauss_hermite_1d(order);
  std::size_t count = 1;
  for (std::size_t j = 0; j < dim; ++j)
    count *= std::size_t(order);
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(Eigen::Index(count), Eigen::Index(dim));
  rule.weights.resize(Eigen::Index(count));
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t q = 0; q < count; ++q) {
    double weight = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      rule.nodes(Eigen::Index(q), Eigen::Index(j)) = base.nodes[idx[j]];
      weight *= base.weights[idx[j]];
    }
    rule.weights(Eigen::Index(q)) = weight;
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < std::size_t(order))
        break;
      idx[j] = 0;
    }
  }
  return rule;
}

double
silverman_h(int d, int n)
{
  if (d < 1 || n < 2)
    throw std::invalid_argument("silverman_h: need d >= 1 and n >= 2");
  return std::pow(4.0 / (double(n) * (d + 2.0)), 2.0 / (d + 4.0));
}

namespace {

Eigen::MatrixXd
shifted_nodes(const QuadratureRule& q, const WeightFunction& w)
{
  if (q.nodes.cols() != w.center.size())
    throw std::invalid_argument("quadrature and weight dimensions differ");
  return q.nodes.rowwise() + w.center.transpose();
}

} // namespace

double
cv_objective(const SampleMatrix& data,
             const BandwidthMatrix& h,
             const WeightFunction& w,
             const QuadratureRule& q,
             const KernelSpec& kernel)
{
  const auto n = data.rows();
  const auto d = data.cols();
  if (n < 3)
    throw std::invalid_argument("cv_objective: need at least three observations");
  if (h.rows() != d || h.cols() != d || !is_spd(h))
    throw std::invalid_argument("cv_objective: bandwidth must be SPD of matching size");
  Eigen::MatrixXd x = shifted_nodes(q, w);
  if (x.cols() != d)
    throw std::invalid_argument("cv_objective: data and quadrature dimensions differ");

  KernelCdf kcdf(kernel, h);
  std::vector<double> diff(static_cast<std::size_t>(d));
  std::vector<double> k(static_cast<std::size_t>(n));
  double total = 0.0;
  for (Eigen::Index node = 0; node < x.rows(); ++node) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j)
        diff[std::size_t(j)] = x(node, j) - data(i, j);
      k[std::size_t(i)] = kcdf(diff);
      sum += k[std::size_t(i)];
    }
    double node_total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      bool below = (data.row(i).array() <= x.row(node).array()).all();
      double loo = (sum - k[std::size_t(i)]) / double(n - 1);
      double r = (below ? 1.0 : 0.0) - loo;
      node_total += r * r;
    }
    total += q.weights(node) * node_total;
  }
  return total / double(n);
}

CVResult
select_bandwidth_cv(const SampleMatrix& data,
                    std::span<const double> h_grid,
                    const WeightFunction& w,
                    const QuadratureRule& q,
                    const KernelSpec& kernel,
                    std::size_t bootstrap_reps,
                    RandomStream& rng,
                    std::size_t threads)
{
  if (h_grid.empty())
    throw std::invalid_argument("select_bandwidth_cv: empty grid");
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    if (!(h_grid[k] > 0.0))
      throw std::invalid_argument("select_bandwidth_cv: grid must be positive");
    if (k > 0 && !(h_grid[k] > h_grid[k - 1]))
      throw std::invalid_argument("select_bandwidth_cv: grid must be ascending");
  }
  CVResult result;
  result.sigma_hat = sample_covariance(data);
  result.h_grid.assign(h_grid.begin(), h_grid.end());
  result.cv_values.resize(h_grid.size());

  std::vector<SampleMatrix> samples;
  if (bootstrap_reps == 0) {
    samples.push_back(data);
  } else {
    for (std::size_t b = 0; b < bootstrap_reps; ++b) {
      SampleMatrix resample(data.rows(), data.cols());
      for (Eigen::Index i = 0; i < data.rows(); ++i)
        resample.row(i) = data.row(Eigen::Index(rng.index(std::size_t(data.rows()))));
      samples.push_back(std::move(resample));
    }
  }
  parallel_for(h_grid.size(), threads, [&](std::size_t k) {
    BandwidthMatrix h = h_grid[k] * result.sigma_hat;
    double acc = 0.0;
    for (const auto& s : samples)
      acc += cv_objective(s, h, w, q, kernel);
    result.cv_values[k] = acc / double(samples.size());
  });
  auto best = std::min_element(result.cv_values.begin(), result.cv_values.end());
  auto k = std::size_t(best - result.cv_values.begin());
  result.h_star = h_grid[k];
  result.H_star = result.h_star * result.sigma_hat;
  result.at_boundary = h_grid.size() > 1 && (k == 0 || k + 1 == h_grid.size());
  return result;
}

GaussianOracle::GaussianOracle(Eigen::VectorXd mu, Eigen::MatrixXd sigma)
  : mu_(std::move(mu))
  , sigma_(std::move(sigma))
{
  if (sigma_.rows() != mu_.size() || !is_spd(sigma_))
    throw std::invalid_argument("GaussianOracle: covariance must be SPD of matching size");
  bool diagonal = sigma_.isDiagonal();
  if (mu_.size() > 2 && !diagonal)
    throw UnsupportedOperation("GaussianOracle: full covariance supported for d <= 2");
  root_ = symmetric_sqrt(sigma_);
}

SampleMatrix
GaussianOracle::sample(std::size_t n, RandomStream& rng) const
{
  SampleMatrix z(Eigen::Index(n), mu_.size());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      z(i, j) = rng.normal();
  return (z * root_).rowwise() + mu_.transpose();
}

double
GaussianOracle::cdf(std::span<const double> x) const
{
  const auto d = mu_.size();
  std::vector<double> z(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j)
    z[std::size_t(j)] = (x[std::size_t(j)] - mu_(j)) / std::sqrt(sigma_(j, j));
  if (d == 2 && sigma_(0, 1) != 0.0)
    return bvn_cdf(z[0], z[1], sigma_(0, 1) / std::sqrt(sigma_(0, 0) * sigma_(1, 1)));
  double p = 1.0;
  for (double v : z)
    p *= norm_cdf(v);
  return p;
}

PointMassOracle::PointMassOracle(Eigen::VectorXd at)
  : at_(std::move(at))
{}

SampleMatrix
PointMassOracle::sample(std::size_t n, RandomStream&) const
{
  return at_.transpose().replicate(Eigen::Index(n), 1);
}

double
PointMassOracle::cdf(std::span<const double> x) const
{
  for (Eigen::Index j = 0; j < at_.size(); ++j)
    if (at_(j) > x[std::size_t(j)])
      return 0.0;
  return 1.0;
}

namespace {

std::vector<double>
truth_at_nodes(const DistributionOracle& truth, const Eigen::MatrixXd& x)
{
  std::vector<double> f(std::size_t(x.rows()));
  std::vector<double> point(std::size_t(x.cols()));
  for (Eigen::Index q = 0; q < x.rows(); ++q) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      point[std::size_t(j)] = x(q, j);
    f[std::size_t(q)] = truth.cdf(point);
  }
  return f;
}

McEstimate
summarize(const std::vector<double>& values)
{
  McEstimate est;
  est.reps = values.size();
  est.mean = mean(values);
  est.se = values.size() > 1 ? standard_error(values) : 0.0;
  return est;
}

} // namespace

McEstimate
mise_mc(const DistributionOracle& truth,
        std::size_t n,
        const BandwidthMatrix& h,
        const WeightFunction& w,
        const QuadratureRule& q,
        const KernelSpec& kernel,
        std::size_t reps,
        RandomStream& rng,
        std::size_t threads)
{
  if (n < 1 || reps < 1)
    throw std::invalid_argument("mise_mc: need n >= 1 and reps >= 1");
  Eigen::MatrixXd x = shifted_nodes(q, w);
  const auto f_true = truth_at_nodes(truth, x);
  const KernelCdf kcdf(kernel, h);
  const std::uint64_t base = rng.next_u64();
  std::vector<double> errors(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    RandomStream local = RandomStream::derive(base, r);
    SampleMatrix s = truth.sample(n, local);
    std::vector<double> diff(std::size_t(x.cols()));
    double err = 0.0;
    for (Eigen::Index node = 0; node < x.rows(); ++node) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j)
          diff[std::size_t(j)] = x(node, j) - s(i, j);
        sum += kcdf(diff);
      }
      double e = sum / double(n) - f_true[std::size_t(node)];
      err += q.weights(node) * e * e;
    }
    errors[r] = err;
  });
  return summarize(errors);
}

McEstimate
d_constant_mc(const DistributionOracle& truth,
              const WeightFunction& w,
              const QuadratureRule& q,
              std::size_t reps,
              RandomStream& rng)
{
  if (reps < 1)
    throw std::invalid_argument("d_constant_mc: reps must be positive");
  Eigen::MatrixXd x = shifted_nodes(q, w);
  const auto f_true = truth_at_nodes(truth, x);
  SampleMatrix s = truth.sample(reps, rng);
  std::vector<double> values(reps);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index node = 0; node < x.rows(); ++node) {
      bool below = (s.row(i).array() <= x.row(node).array()).all();
      double r = (below ? 1.0 : 0.0) - f_true[std::size_t(node)];
      acc += q.weights(node) * r * r;
    }
    values[std::size_t(i)] = acc;
  }
  return summarize(values);
}

} // namespace smoothcop
