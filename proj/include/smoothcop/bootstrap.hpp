#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smoothcop/kernel.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/random.hpp"

namespace smoothcop {

enum class BandwidthRule
{
  silverman,
  cv,
  fixed
};

enum class Transform
{
  none,
  normal_scores
};

BandwidthRule parse_bandwidth_rule(std::string_view name);

struct CvSettings
{
  std::vector<double> h_grid; // empty means 0.01, 0.02, ..., 2.5
  int gh_order = 25;
  std::size_t bootstrap_reps = 0;
};

struct BootstrapConfig
{
  std::size_t m = 1000;
  std::size_t B = 1;
  KernelSpec kernel = KernelSpec::gauss();
  BandwidthRule bandwidth_rule = BandwidthRule::silverman;
  BandwidthMatrix fixed_H; // used when bandwidth_rule == fixed
  Transform transform = Transform::normal_scores;
  std::uint64_t seed = 0;
  CvSettings cv;

  void validate() const;
};

//! Steps before sampling: optional rank and normal-scores transform,
//! Sigma_hat on the transformed data and the bandwidth matrix.
SmoothedModel fit_smoothed_model(const SampleMatrix& data_u,
                                 const BootstrapConfig& cfg,
                                 RandomStream& rng);

//! u_lj = F_nj(x_ij + (H^1/2 y_l)_j) for given indices i_l and kernel draws y_l.
SampleMatrix transform_draws(const SmoothedModel& model,
                             std::span<const std::size_t> indices,
                             const SampleMatrix& noise);

//! m copula draws from a fitted model. For each draw the index is taken
//! first, then the kernel vector, from the same stream.
SampleMatrix draw_copula_sample(const SmoothedModel& model, std::size_t m, RandomStream& rng);

//! Pre-transform mixture draws z = x_i + H^1/2 y.
SampleMatrix draw_mixture_sample(const SmoothedModel& model, std::size_t m, RandomStream& rng);

SampleMatrix smooth_bootstrap_copula_sample(const SampleMatrix& data_u,
                                            const BootstrapConfig& cfg,
                                            RandomStream& rng);

//! m rows drawn with replacement.
SampleMatrix plain_bootstrap(const SampleMatrix& data, std::size_t m, RandomStream& rng);

enum class Functional
{
  tau,
  rho_s
};

Functional parse_functional(std::string_view name);
double evaluate_functional(Functional f, const SampleMatrix& sample);

//! B replicate values of the functional on independent smooth bootstrap
//! samples; replicate b uses the stream derived from (cfg.seed, b).
std::vector<double> functional_distribution(const SampleMatrix& data_u,
                                            const BootstrapConfig& cfg,
                                            Functional functional,
                                            RandomStream& rng,
                                            std::size_t threads = 1);

} // namespace smoothcop
