#include "smoothcop/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

#include "smoothcop/errors.hpp"
#include "smoothcop/normal.hpp"

namespace smoothcop {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr std::size_t quantile_nodes = 512;

} // namespace

KernelSpec
KernelSpec::parse(std::string_view name)
{
  if (name == "gauss" || name == "gaussian")
    return gauss();
  if (name == "laplace")
    return laplace();
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

const char*
KernelSpec::name() const
{
  return kind_ == KernelKind::gauss ? "gauss" : "laplace";
}

CharGenerator
KernelSpec::generator() const
{
  return kind_ == KernelKind::gauss ? CharGenerator::gauss() : CharGenerator::laplace();
}

double
KernelSpec::marginal_cdf(double z) const
{
  if (kind_ == KernelKind::gauss)
    return norm_cdf(z);
  if (z < 0.0)
    return 0.5 * std::exp(std::numbers::sqrt2 * z);
  return 1.0 - 0.5 * std::exp(-std::numbers::sqrt2 * z);
}

double
KernelSpec::marginal_pdf(double z) const
{
  if (kind_ == KernelKind::gauss)
    return norm_pdf(z);
  return std::exp(-std::numbers::sqrt2 * std::abs(z)) / std::numbers::sqrt2;
}

double
KernelSpec::density(double r2, std::size_t d) const
{
  const double half = 0.5 * double(d);
  if (kind_ == KernelKind::gauss)
    return std::exp(-0.5 * r2 - half * std::log(2.0 * std::numbers::pi));
  if (r2 == 0.0)
    return d == 1 ? 1.0 / std::numbers::sqrt2 : inf;
  double order = 1.0 - half;
  double k = boost::math::cyl_bessel_k(std::abs(order), std::sqrt(2.0 * r2));
  return 2.0 * std::pow(2.0 * std::numbers::pi, -half) * std::pow(0.5 * r2, 0.5 * order) * k;
}

void
KernelSpec::draw(RandomStream& rng, std::span<double> out) const
{
  double scale = kind_ == KernelKind::gauss ? 1.0 : std::sqrt(rng.exponential());
  for (double& x : out)
    x = scale * rng.normal();
}

KernelCdf::KernelCdf(const KernelSpec& kernel, const BandwidthMatrix& h)
  : kernel_(kernel)
  , dim_(std::size_t(h.rows()))
{
  scale_.resize(dim_);
  for (std::size_t j = 0; j < dim_; ++j)
    scale_[j] = std::sqrt(h(Eigen::Index(j), Eigen::Index(j)));
  for (Eigen::Index a = 0; a < h.rows(); ++a)
    for (Eigen::Index b = 0; b < h.cols(); ++b)
      if (a != b && h(a, b) != 0.0)
        diagonal_ = false;
  if (dim_ == 2)
    corr_ = std::clamp(h(0, 1) / (scale_[0] * scale_[1]), -1.0, 1.0);
  if (dim_ > 1) {
    if (kernel_.kind() != KernelKind::gauss)
      throw UnsupportedOperation("joint kernel CDF: only the Gaussian kernel for d > 1");
    if (dim_ > 2 && !diagonal_)
      throw UnsupportedOperation("joint kernel CDF: full bandwidth supported for d <= 2");
  }
}

double
KernelCdf::operator()(std::span<const double> y) const
{
  if (dim_ == 1)
    return kernel_.marginal_cdf(y[0] / scale_[0]);
  if (dim_ == 2 && !diagonal_)
    return bvn_cdf(y[0] / scale_[0], y[1] / scale_[1], corr_);
  double p = 1.0;
  for (std::size_t j = 0; j < dim_; ++j)
    p *= kernel_.marginal_cdf(y[j] / scale_[j]);
  return p;
}

struct SmoothedModel::QuantileTables
{
  explicit QuantileTables(std::size_t d)
    : flags(std::make_unique<std::once_flag[]>(d))
    , x_nodes(d)
  {
    p_nodes.resize(quantile_nodes);
    for (std::size_t k = 0; k < quantile_nodes; ++k)
      p_nodes[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * (double(k) + 0.5) /
                                         double(quantile_nodes)));
  }

  std::unique_ptr<std::once_flag[]> flags;
  std::vector<double> p_nodes;
  std::vector<std::vector<double>> x_nodes;
};

SmoothedModel::SmoothedModel(SampleMatrix data, KernelSpec kernel, BandwidthMatrix h)
  : data_(std::move(data))
  , kernel_(kernel)
  , h_(std::move(h))
{
  if (data_.rows() == 0)
    throw std::invalid_argument("SmoothedModel: empty data");
  if (h_.rows() != data_.cols() || h_.cols() != data_.cols())
    throw std::invalid_argument("SmoothedModel: bandwidth has wrong shape");
  if (!is_symmetric(h_, 1e-12))
    throw std::invalid_argument("SmoothedModel: bandwidth must be symmetric");
  for (Eigen::Index j = 0; j < h_.rows(); ++j)
    if (!(h_(j, j) > 0.0))
      throw std::invalid_argument("SmoothedModel: bandwidth diagonal must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff())
    throw std::invalid_argument("SmoothedModel: bandwidth must be positive semidefinite");
  h_sqrt_ = symmetric_sqrt(h_);
  marginal_h_.resize(dim());
  for (std::size_t j = 0; j < dim(); ++j)
    marginal_h_[j] = std::sqrt(h_(Eigen::Index(j), Eigen::Index(j)));
  spd_ = is_spd(h_);
  if (spd_) {
    h_inv_ = h_.inverse();
    h_det_ = h_.determinant();
  }
  tables_ = std::make_unique<QuantileTables>(dim());
}

SmoothedModel::SmoothedModel(const SmoothedModel& other)
  : data_(other.data_)
  , kernel_(other.kernel_)
  , h_(other.h_)
  , h_sqrt_(other.h_sqrt_)
  , marginal_h_(other.marginal_h_)
  , spd_(other.spd_)
  , h_inv_(other.h_inv_)
  , h_det_(other.h_det_)
  , tables_(std::make_unique<QuantileTables>(other.dim()))
{}

SmoothedModel::SmoothedModel(SmoothedModel&&) noexcept = default;
SmoothedModel::~SmoothedModel() = default;

const Eigen::MatrixXd&
SmoothedModel::bandwidth_inverse() const
{
  if (!spd_)
    throw std::invalid_argument("SmoothedModel: bandwidth matrix is singular");
  return h_inv_;
}

double
SmoothedModel::bandwidth_det() const
{
  if (!spd_)
    throw std::invalid_argument("SmoothedModel: bandwidth matrix is singular");
  return h_det_;
}

double
kde_density(const SmoothedModel& m, std::span<const double> x)
{
  if (x.size() != m.dim())
    throw std::invalid_argument("kde_density: point has wrong dimension");
  const auto& h_inv = m.bandwidth_inverse();
  const double norm = 1.0 / std::sqrt(m.bandwidth_det());
  Eigen::Map<const Eigen::VectorXd> point(x.data(), Eigen::Index(x.size()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.data().rows(); ++i) {
    Eigen::VectorXd diff = point - m.data().row(i).transpose();
    sum += m.kernel().density(diff.dot(h_inv * diff), m.dim());
  }
  return norm * sum / double(m.size());
}

double
kde_cdf(const SmoothedModel& m, std::span<const double> x)
{
  if (x.size() != m.dim())
    throw std::invalid_argument("kde_cdf: point has wrong dimension");
  if (m.dim() > 1 && !m.bandwidth_is_spd())
    throw std::invalid_argument("kde_cdf: bandwidth matrix is singular");
  KernelCdf kcdf(m.kernel(), m.bandwidth());
  std::vector<double> diff(m.dim());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.data().rows(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j)
      diff[j] = x[j] - m.data()(i, Eigen::Index(j));
    sum += kcdf(diff);
  }
  return std::clamp(sum / double(m.size()), 0.0, 1.0);
}

double
marginal_cdf(const SmoothedModel& m, std::size_t j, double x)
{
  if (j >= m.dim())
    throw std::out_of_range("marginal_cdf: coordinate index out of range");
  const double h = m.marginal_bandwidth(j);
  const auto col = m.data().col(Eigen::Index(j));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < col.size(); ++i)
    sum += m.kernel().marginal_cdf((x - col(i)) / h);
  return sum / double(col.size());
}

double
marginal_pdf(const SmoothedModel& m, std::size_t j, double x)
{
  if (j >= m.dim())
    throw std::out_of_range("marginal_pdf: coordinate index out of range");
  const double h = m.marginal_bandwidth(j);
  const auto col = m.data().col(Eigen::Index(j));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < col.size(); ++i)
    sum += m.kernel().marginal_pdf((x - col(i)) / h);
  return sum / (double(col.size()) * h);
}

namespace {

// Illinois-modified regula falsi on a sign-changing bracket, with a
// bisection step whenever the bracket fails to halve.
template<class Fn>
double
bracketed_root(Fn&& f, double a, double b, double fa, double fb)
{
  int side = 0;
  double best = std::abs(fa) < std::abs(fb) ? a : b;
  double best_f = std::min(std::abs(fa), std::abs(fb));
  for (int it = 0; it < 300; ++it) {
    double width = b - a;
    double x = (a * fb - b * fa) / (fb - fa);
    if (!(x > a && x < b) || it % 4 == 3)
      x = 0.5 * (a + b);
    double fx = f(x);
    if (std::abs(fx) < best_f) {
      best = x;
      best_f = std::abs(fx);
    }
    if (best_f < 1e-14)
      return best;
    if (fx < 0.0) {
      a = x;
      fa = fx;
      if (side == -1)
        fb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1)
        fa *= 0.5;
      side = 1;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)) ||
        b - a == width)
      break;
  }
  return best;
}

double
solve_quantile(const SmoothedModel& m, std::size_t j, double p)
{
  const auto col = m.data().col(Eigen::Index(j));
  const double h = m.marginal_bandwidth(j);
  const double lo0 = col.minCoeff();
  const double hi0 = col.maxCoeff();
  auto f = [&](double x) { return marginal_cdf(m, j, x) - p; };

  // sample quantile as a starting point
  std::vector<double> sorted(col.data(), col.data() + col.size());
  std::sort(sorted.begin(), sorted.end());
  double pos = p * double(sorted.size() - 1);
  auto k = std::size_t(pos);
  double start = sorted[k] + (pos - double(k)) *
                               (sorted[std::min(k + 1, sorted.size() - 1)] - sorted[k]);
  double f_start = f(start);
  if (f_start == 0.0)
    return start;

  double a, b, fa, fb;
  if (f_start < 0.0) {
    a = start;
    fa = f_start;
    double pad = 10.0 * h;
    b = hi0 + pad;
    fb = f(b);
    for (int doublings = 0; fb < 0.0; ++doublings) {
      if (doublings >= 60)
        throw ConvergenceError("marginal_quantile: bracket expansion failed");
      pad *= 2.0;
      b = hi0 + pad;
      fb = f(b);
    }
  } else {
    b = start;
    fb = f_start;
    double pad = 10.0 * h;
    a = lo0 - pad;
    fa = f(a);
    for (int doublings = 0; fa > 0.0; ++doublings) {
      if (doublings >= 60)
        throw ConvergenceError("marginal_quantile: bracket expansion failed");
      pad *= 2.0;
      a = lo0 - pad;
      fa = f(a);
    }
  }
  if (fa == 0.0)
    return a;
  if (fb == 0.0)
    return b;
  return bracketed_root(f, a, b, fa, fb);
}

} // namespace

void
SmoothedModel::prepare_quantile_tables() const
{
  for (std::size_t j = 0; j < dim(); ++j)
    marginal_quantile(*this, j, 0.5);
}

double
marginal_quantile(const SmoothedModel& m, std::size_t j, double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("marginal_quantile: p must lie in (0, 1)");
  if (j >= m.dim())
    throw std::out_of_range("marginal_quantile: coordinate index out of range");
  auto& tables = *m.tables_;
  std::call_once(tables.flags[j], [&] {
    std::vector<double> xs(tables.p_nodes.size());
    for (std::size_t k = 0; k < xs.size(); ++k)
      xs[k] = solve_quantile(m, j, tables.p_nodes[k]);
    // rounding can leave equal neighbours; enforce monotonicity
    for (std::size_t k = 1; k < xs.size(); ++k)
      xs[k] = std::max(xs[k], xs[k - 1]);
    tables.x_nodes[j] = std::move(xs);
  });
  const auto& ps = tables.p_nodes;
  const auto& xs = tables.x_nodes[j];
  if (p <= ps.front() || p >= ps.back())
    return solve_quantile(m, j, p);
  auto k = std::size_t(std::upper_bound(ps.begin(), ps.end(), p) - ps.begin()) - 1;
  auto f = [&](double x) { return marginal_cdf(m, j, x) - p; };
  double a = xs[k], b = xs[k + 1];
  double fa = f(a), fb = f(b);
  if (fa > 0.0 || fb < 0.0)
    return solve_quantile(m, j, p);
  if (fa == 0.0)
    return a;
  if (fb == 0.0)
    return b;
  return bracketed_root(f, a, b, fa, fb);
}

double
smoothed_copula_eval(const SmoothedModel& m, std::span<const double> u)
{
  if (u.size() != m.dim())
    throw std::invalid_argument("smoothed_copula_eval: point has wrong dimension");
  std::vector<double> x(m.dim());
  for (std::size_t j = 0; j < m.dim(); ++j) {
    if (!(u[j] >= 0.0 && u[j] <= 1.0))
      throw std::domain_error("smoothed_copula_eval: point outside the unit cube");
    if (u[j] == 0.0)
      return 0.0;
    x[j] = u[j] == 1.0 ? inf : marginal_quantile(m, j, u[j]);
  }
  return kde_cdf(m, x);
}

} // namespace smoothcop
