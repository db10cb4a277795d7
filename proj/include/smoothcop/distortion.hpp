#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "smoothcop/elliptical.hpp"
#include "smoothcop/generator.hpp"
#include "smoothcop/random.hpp"

namespace smoothcop {

struct DistortionReport
{
  std::vector<double> u_grid;
  //! 1 - gy(c u)
  std::vector<double> rel_error;
  //! Bound on |phi_X(t) - phi_Z(t)| per supplied t; empty when no t given.
  std::vector<double> abs_bound;
  double rate_exponent = 0.0;
};

//! Relative characteristic-function error of smoothing with generator gy
//! and H = c Sigma. The rate exponent is the fitted log-log slope in c at u = 1.
DistortionReport relative_error_curve(const CharGenerator& gy,
                                      double c,
                                      std::span<const double> u_grid);

//! Same, plus the bound 1 - gy(c t' Sigma t) for each row of t_vectors.
DistortionReport relative_error_curve(const CharGenerator& gy,
                                      double c,
                                      std::span<const double> u_grid,
                                      const Eigen::MatrixXd& sigma,
                                      const Eigen::MatrixXd& t_vectors);

//! Least-squares slope of log(1 - gy(c u)) against log c over c = 2^-k, k = 4..12.
double fit_rate_exponent(const CharGenerator& gy, double u = 1.0);

struct LaplaceBound
{
  double T_star;
  double bound;
  //! |c s2 T^3 - M c s2 T^2 / 2 - M| relative to the sum of the term magnitudes.
  double foc_residual;
};

//! Uniform-distance bound between a 1-D Laplace law with variance sigma2
//! and its Gaussian-smoothed version with H = c sigma2, minimised in T.
LaplaceBound laplace_uniform_bound(double c, double sigma2, double M);
//! log(c s2 T^2 / 2 + 1) / pi + M / (pi T)
double laplace_bound_value(double c, double sigma2, double M, double T);
//! 24 sup f for the Laplace density with variance sigma2.
double laplace_default_M(double sigma2);

struct CorrelationReport
{
  Eigen::MatrixXd corr_x;
  Eigen::MatrixXd corr_z;
  double max_corr_gap = 0.0;
  //! trace cov(Z) / trace cov(X)
  double inflation_observed = 0.0;
  //! 1 + c psi_Y'(0) / psi_X'(0)
  double inflation_theory = 0.0;
  double tau_x = 0.0;
  double tau_z = 0.0;
  //! Standard error of tau_x - tau_z from the paired influence values.
  double tau_diff_se = 0.0;
};

//! Monte Carlo comparison of X and Z = X + Y with Y elliptical, generator
//! kernel_gen and scale matrix c Sigma. Tau uses the first two coordinates.
CorrelationReport correlation_preservation_check(const EllipticalSpec& spec,
                                                 const CharGenerator& kernel_gen,
                                                 double c,
                                                 std::size_t n_mc,
                                                 RandomStream& rng,
                                                 std::size_t threads = 1);

} // namespace smoothcop
