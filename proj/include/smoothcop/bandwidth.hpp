#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "smoothcop/kernel.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/random.hpp"

namespace smoothcop {

//! x -> exp(-||x - center||^2).
struct WeightFunction
{
  Eigen::VectorXd center;

  double operator()(std::span<const double> x) const;
  //! pi^(d/2).
  double integral() const;
};

//! Tensor Gauss-Hermite rule for integrals against exp(-||t||^2).
struct QuadratureRule
{
  Eigen::MatrixXd nodes; // one node per row
  Eigen::VectorXd weights;
  int order = 0;

  static QuadratureRule gauss_hermite(int order, std::size_t dim);
  std::size_t size() const { return std::size_t(weights.size()); }
};

struct HermiteRule1d
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

//! Golub-Welsch nodes polished by Newton steps on the Hermite recurrence.
HermiteRule1d gauss_hermite_1d(int order);

struct CVResult
{
  std::vector<double> h_grid;
  std::vector<double> cv_values;
  double h_star = 0.0;
  BandwidthMatrix H_star;
  Eigen::MatrixXd sigma_hat;
  //! True when the minimiser sits on the first or last grid point.
  bool at_boundary = false;
};

//! (4 / (n (d + 2)))^(2 / (d + 4)); the bandwidth matrix is h * Sigma_hat.
double silverman_h(int d, int n);

//! Weighted leave-one-out cross-validation objective for a distribution
//! estimate. The weight is absorbed into the Gauss-Hermite weight by
//! shifting nodes to w.center.
double cv_objective(const SampleMatrix& data,
                    const BandwidthMatrix& h,
                    const WeightFunction& w,
                    const QuadratureRule& q,
                    const KernelSpec& kernel);

//! Grid minimisation of the objective over H = h * Sigma_hat. With
//! bootstrap_reps > 0 the objective is averaged over that many resamples
//! (drawn once and shared across the grid); the weight centre stays fixed.
CVResult select_bandwidth_cv(const SampleMatrix& data,
                             std::span<const double> h_grid,
                             const WeightFunction& w,
                             const QuadratureRule& q,
                             const KernelSpec& kernel,
                             std::size_t bootstrap_reps,
                             RandomStream& rng,
                             std::size_t threads = 1);

//! Sampler plus exact CDF, used as ground truth.
class DistributionOracle
{
public:
  virtual ~DistributionOracle() = default;
  virtual std::size_t dim() const = 0;
  virtual SampleMatrix sample(std::size_t n, RandomStream& rng) const = 0;
  virtual double cdf(std::span<const double> x) const = 0;
};

//! Normal law N(mu, sigma) in d <= 2 (any d for diagonal sigma).
class GaussianOracle : public DistributionOracle
{
public:
  GaussianOracle(Eigen::VectorXd mu, Eigen::MatrixXd sigma);
  std::size_t dim() const override { return std::size_t(mu_.size()); }
  SampleMatrix sample(std::size_t n, RandomStream& rng) const override;
  double cdf(std::span<const double> x) const override;

private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd root_;
};

//! Degenerate law at a single point.
class PointMassOracle : public DistributionOracle
{
public:
  explicit PointMassOracle(Eigen::VectorXd at);
  std::size_t dim() const override { return std::size_t(at_.size()); }
  SampleMatrix sample(std::size_t n, RandomStream& rng) const override;
  double cdf(std::span<const double> x) const override;

private:
  Eigen::VectorXd at_;
};

struct McEstimate
{
  double mean = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
};

//! Monte Carlo weighted MISE of the kernel distribution estimate at size n.
McEstimate mise_mc(const DistributionOracle& truth,
                   std::size_t n,
                   const BandwidthMatrix& h,
                   const WeightFunction& w,
                   const QuadratureRule& q,
                   const KernelSpec& kernel,
                   std::size_t reps,
                   RandomStream& rng,
                   std::size_t threads = 1);

//! Monte Carlo estimate of E int (1{X <= x} - F(x))^2 w(x) dx.
McEstimate d_constant_mc(const DistributionOracle& truth,
                         const WeightFunction& w,
                         const QuadratureRule& q,
                         std::size_t reps,
                         RandomStream& rng);

} // namespace smoothcop
