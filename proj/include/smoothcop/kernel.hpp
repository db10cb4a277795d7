#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "smoothcop/generator.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/random.hpp"

namespace smoothcop {

enum class KernelKind
{
  gauss,
  laplace
};

//! Spherical kernel with zero mean and identity covariance.
class KernelSpec
{
public:
  static KernelSpec gauss() { return KernelSpec(KernelKind::gauss); }
  static KernelSpec laplace() { return KernelSpec(KernelKind::laplace); }
  static KernelSpec parse(std::string_view name);

  KernelKind kind() const { return kind_; }
  const char* name() const;
  CharGenerator generator() const;
  //! Marginal second moment of one component.
  double mu2() const { return 1.0; }

  double marginal_cdf(double z) const;
  double marginal_pdf(double z) const;
  //! Spherical density at squared radius r2 in dimension d.
  double density(double r2, std::size_t d) const;
  //! Fills `out` with one draw from the d-dimensional kernel.
  void draw(RandomStream& rng, std::span<double> out) const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
  explicit KernelSpec(KernelKind kind)
    : kind_(kind)
  {}
  KernelKind kind_;
};

//! Rescaled kernel CDF y -> K_H(y) for a fixed bandwidth matrix.
class KernelCdf
{
public:
  KernelCdf(const KernelSpec& kernel, const BandwidthMatrix& h);
  double operator()(std::span<const double> y) const;

private:
  KernelSpec kernel_;
  std::size_t dim_;
  std::vector<double> scale_;
  double corr_ = 0.0;
  bool diagonal_ = true;
};

//! Kernel mixture fitted to data with bandwidth matrix H. Immutable after
//! construction apart from the lazily built quantile tables.
class SmoothedModel
{
public:
  //! H must be symmetric positive semidefinite with positive diagonal.
  //! Operations needing H^-1 (density, joint CDF) require H to be SPD.
  SmoothedModel(SampleMatrix data, KernelSpec kernel, BandwidthMatrix h);
  SmoothedModel(const SmoothedModel&);
  SmoothedModel(SmoothedModel&&) noexcept;
  SmoothedModel& operator=(SmoothedModel) = delete;
  ~SmoothedModel();

  const SampleMatrix& data() const { return data_; }
  const KernelSpec& kernel() const { return kernel_; }
  const BandwidthMatrix& bandwidth() const { return h_; }
  const Eigen::MatrixXd& bandwidth_sqrt() const { return h_sqrt_; }
  double marginal_bandwidth(std::size_t j) const { return marginal_h_[j]; }
  std::size_t size() const { return std::size_t(data_.rows()); }
  std::size_t dim() const { return std::size_t(data_.cols()); }
  bool bandwidth_is_spd() const { return spd_; }
  //! Throw std::invalid_argument when H is singular.
  const Eigen::MatrixXd& bandwidth_inverse() const;
  double bandwidth_det() const;

  //! Builds all per-coordinate quantile tables now (call before parallel use
  //! when a single writer is not guaranteed).
  void prepare_quantile_tables() const;

private:
  friend double marginal_quantile(const SmoothedModel&, std::size_t, double);
  struct QuantileTables;

  SampleMatrix data_;
  KernelSpec kernel_;
  BandwidthMatrix h_;
  Eigen::MatrixXd h_sqrt_;
  std::vector<double> marginal_h_;
  bool spd_;
  Eigen::MatrixXd h_inv_;
  double h_det_ = 0.0;
  std::unique_ptr<QuantileTables> tables_;
};

double kde_density(const SmoothedModel& m, std::span<const double> x);
double kde_cdf(const SmoothedModel& m, std::span<const double> x);
//! j is zero-based.
double marginal_cdf(const SmoothedModel& m, std::size_t j, double x);
double marginal_pdf(const SmoothedModel& m, std::size_t j, double x);
//! Solves marginal_cdf(m, j, x) = p to 1e-10 in p.
double marginal_quantile(const SmoothedModel& m, std::size_t j, double p);
double smoothed_copula_eval(const SmoothedModel& m, std::span<const double> u);

} // namespace smoothcop
