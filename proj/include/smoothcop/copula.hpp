#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "smoothcop/linalg.hpp"
#include "smoothcop/polygon.hpp"
#include "smoothcop/random.hpp"

namespace smoothcop {

enum class CopulaFamily
{
  clayton,
  gumbel,
  joe,
  gaussian,
  student_t,
  independence
};

struct CopulaSpec
{
  CopulaFamily family = CopulaFamily::independence;
  double theta = 0.0; // Archimedean parameter
  double rho = 0.0;   // elliptical correlation (equicorrelation when dim > 2)
  double nu = 0.0;    // degrees of freedom for student_t
  std::size_t dim = 2;

  static CopulaSpec clayton(double theta, std::size_t dim = 2);
  static CopulaSpec gumbel(double theta, std::size_t dim = 2);
  static CopulaSpec joe(double theta, std::size_t dim = 2);
  static CopulaSpec gaussian(double rho, std::size_t dim = 2);
  static CopulaSpec student_t(double rho, double nu, std::size_t dim = 2);
  static CopulaSpec independence(std::size_t dim = 2);
  //! "clayton:theta", "gumbel:theta", "joe:theta", "gaussian:rho",
  //! "t:rho,nu", "indep".
  static CopulaSpec parse(std::string_view text, std::size_t dim = 2);

  void validate() const;
  std::string family_name() const;
  std::string parameter_label() const;
  std::string label() const;
};

//! Clayton parameter with Kendall tau equal to `tau`.
double clayton_theta_from_tau(double tau);

double copula_cdf(const CopulaSpec& spec, std::span<const double> u);
SampleMatrix sample_copula(const CopulaSpec& spec, std::size_t n, RandomStream& rng);
double true_tau(const CopulaSpec& spec);
double true_rho_s(const CopulaSpec& spec);

//! Points (u, v(u)) on {C_theta = t} for u uniform in [t, 1].
PolygonChain clayton_level_boundary(double theta, double t, std::size_t n_pts);

//! Column-wise average ranks divided by n + 1.
SampleMatrix pseudo_observations(const SampleMatrix& x);

class EmpiricalCopula
{
public:
  //! Rank-transforms `data` into pseudo-observations.
  explicit EmpiricalCopula(const SampleMatrix& data);
  static EmpiricalCopula from_pseudo_observations(SampleMatrix pseudo_obs);

  double operator()(std::span<const double> u) const;
  const SampleMatrix& pseudo_obs() const { return pseudo_obs_; }
  std::size_t size() const { return std::size_t(pseudo_obs_.rows()); }
  std::size_t dim() const { return std::size_t(pseudo_obs_.cols()); }

  //! Values on the tensor grid g x g for a bivariate copula, g ascending:
  //! result(a, b) = C_n(g[a], g[b]). Uses binned 2-D cumulative counts.
  Eigen::MatrixXd grid_values(std::span<const double> g) const;

private:
  EmpiricalCopula() = default;
  SampleMatrix pseudo_obs_;
};

double empirical_copula_eval(const EmpiricalCopula& ec, std::span<const double> u);

} // namespace smoothcop
