#include "smoothcop/bootstrap.hpp"

#include <algorithm>
#include <stdexcept>

#include "smoothcop/bandwidth.hpp"
#include "smoothcop/copula.hpp"
#include "smoothcop/functionals.hpp"
#include "smoothcop/io.hpp"
#include "smoothcop/normal.hpp"
#include "smoothcop/parallel.hpp"

namespace smoothcop {

BandwidthRule
parse_bandwidth_rule(std::string_view name)
{
  if (name == "silverman")
    return BandwidthRule::silverman;
  if (name == "cv")
    return BandwidthRule::cv;
  if (name == "fixed")
    return BandwidthRule::fixed;
  throw std::invalid_argument("unknown bandwidth rule '" + std::string(name) + "'");
}

void
BootstrapConfig::validate() const
{
  if (m < 1 || B < 1)
    throw std::invalid_argument("bootstrap config: m and B must be positive");
  if (bandwidth_rule == BandwidthRule::fixed && fixed_H.size() == 0)
    throw std::invalid_argument("bootstrap config: fixed rule needs a bandwidth matrix");
}

namespace {

bool
strictly_inside_unit(const SampleMatrix& x)
{
  return (x.array() > 0.0).all() && (x.array() < 1.0).all();
}

bool
inside_closed_unit(const SampleMatrix& x)
{
  return (x.array() >= 0.0).all() && (x.array() <= 1.0).all();
}

} // namespace

SmoothedModel
fit_smoothed_model(const SampleMatrix& data_u, const BootstrapConfig& cfg, RandomStream& rng)
{
  cfg.validate();
  if (data_u.rows() < 2)
    throw std::invalid_argument("smooth bootstrap: need at least two observations");

  SampleMatrix x;
  if (cfg.transform == Transform::normal_scores) {
    SampleMatrix u = data_u;
    if (!inside_closed_unit(u))
      u = pseudo_observations(u);
    else if (!strictly_inside_unit(u))
      throw std::domain_error("smooth bootstrap: entries at 0 or 1 have infinite normal scores");
    x = u.unaryExpr([](double p) { return norm_quantile(p); });
  } else {
    x = data_u;
  }

  const auto d = int(x.cols());
  const auto n = int(x.rows());
  BandwidthMatrix h;
  switch (cfg.bandwidth_rule) {
    case BandwidthRule::silverman:
      h = silverman_h(d, n) * sample_covariance(x);
      break;
    case BandwidthRule::cv: {
      auto grid = cfg.cv.h_grid.empty() ? arithmetic_grid(0.01, 2.5, 0.01) : cfg.cv.h_grid;
      WeightFunction w{ column_means(x) };
      auto q = QuadratureRule::gauss_hermite(cfg.cv.gh_order, std::size_t(d));
      h = select_bandwidth_cv(x, grid, w, q, cfg.kernel, cfg.cv.bootstrap_reps, rng).H_star;
      break;
    }
    case BandwidthRule::fixed:
      if (cfg.fixed_H.rows() != d || cfg.fixed_H.cols() != d)
        throw std::invalid_argument("smooth bootstrap: fixed bandwidth has wrong shape");
      h = cfg.fixed_H;
      break;
  }
  return SmoothedModel(std::move(x), cfg.kernel, std::move(h));
}

SampleMatrix
transform_draws(const SmoothedModel& model,
                std::span<const std::size_t> indices,
                const SampleMatrix& noise)
{
  const auto d = Eigen::Index(model.dim());
  if (noise.rows() != Eigen::Index(indices.size()) || noise.cols() != d)
    throw std::invalid_argument("transform_draws: noise has wrong shape");
  SampleMatrix shifted = noise * model.bandwidth_sqrt();
  SampleMatrix u(shifted.rows(), d);
  for (Eigen::Index l = 0; l < shifted.rows(); ++l) {
    auto i = Eigen::Index(indices[std::size_t(l)]);
    for (Eigen::Index j = 0; j < d; ++j)
      u(l, j) = marginal_cdf(model, std::size_t(j), model.data()(i, j) + shifted(l, j));
  }
  return u;
}

namespace {

void
draw_indices_and_noise(const SmoothedModel& model,
                       std::size_t m,
                       RandomStream& rng,
                       std::vector<std::size_t>& indices,
                       SampleMatrix& noise)
{
  const auto d = Eigen::Index(model.dim());
  indices.resize(m);
  noise.resize(Eigen::Index(m), d);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (std::size_t l = 0; l < m; ++l) {
    indices[l] = rng.index(model.size());
    model.kernel().draw(rng, y);
    for (Eigen::Index j = 0; j < d; ++j)
      noise(Eigen::Index(l), j) = y[std::size_t(j)];
  }
}

} // namespace

SampleMatrix
draw_copula_sample(const SmoothedModel& model, std::size_t m, RandomStream& rng)
{
  std::vector<std::size_t> indices;
  SampleMatrix noise;
  draw_indices_and_noise(model, m, rng, indices, noise);
  return transform_draws(model, indices, noise);
}

SampleMatrix
draw_mixture_sample(const SmoothedModel& model, std::size_t m, RandomStream& rng)
{
  std::vector<std::size_t> indices;
  SampleMatrix noise;
  draw_indices_and_noise(model, m, rng, indices, noise);
  SampleMatrix z = noise * model.bandwidth_sqrt();
  for (Eigen::Index l = 0; l < z.rows(); ++l)
    z.row(l) += model.data().row(Eigen::Index(indices[std::size_t(l)]));
  return z;
}

SampleMatrix
smooth_bootstrap_copula_sample(const SampleMatrix& data_u,
                               const BootstrapConfig& cfg,
                               RandomStream& rng)
{
  SmoothedModel model = fit_smoothed_model(data_u, cfg, rng);
  return draw_copula_sample(model, cfg.m, rng);
}

SampleMatrix
plain_bootstrap(const SampleMatrix& data, std::size_t m, RandomStream& rng)
{
  if (data.rows() < 1)
    throw std::invalid_argument("plain_bootstrap: empty data");
  SampleMatrix out(Eigen::Index(m), data.cols());
  for (Eigen::Index l = 0; l < out.rows(); ++l)
    out.row(l) = data.row(Eigen::Index(rng.index(std::size_t(data.rows()))));
  return out;
}

Functional
parse_functional(std::string_view name)
{
  if (name == "tau")
    return Functional::tau;
  if (name == "rho" || name == "rho_s")
    return Functional::rho_s;
  throw std::invalid_argument("unsupported functional '" + std::string(name) + "'");
}

double
evaluate_functional(Functional f, const SampleMatrix& sample)
{
  return f == Functional::tau ? sample_tau(sample) : sample_rho_s(sample);
}

std::vector<double>
functional_distribution(const SampleMatrix& data_u,
                        const BootstrapConfig& cfg,
                        Functional functional,
                        RandomStream& rng,
                        std::size_t threads)
{
  SmoothedModel model = fit_smoothed_model(data_u, cfg, rng);
  std::vector<double> values(cfg.B);
  parallel_for(cfg.B, threads, [&](std::size_t b) {
    RandomStream local = RandomStream::derive(cfg.seed, b);
    values[b] = evaluate_functional(functional, draw_copula_sample(model, cfg.m, local));
  });
  return values;
}

} // namespace smoothcop
