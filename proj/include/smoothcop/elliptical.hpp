#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "smoothcop/generator.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/random.hpp"

namespace smoothcop {

//! Elliptical law E_d(mu, Sigma, psi).
struct EllipticalSpec
{
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  CharGenerator generator = CharGenerator::gauss();

  std::size_t dim() const { return std::size_t(mu.size()); }
  //! Throws std::invalid_argument unless sigma is SPD and sizes agree.
  void validate() const;
  //! Rescales so that sigma is the covariance matrix:
  //! sigma' = -2 psi'(0) sigma and psi'(u) = psi(u / (-2 psi'(0))).
  EllipticalSpec normalize() const;
};

std::complex<double> characteristic_function(const EllipticalSpec& spec,
                                             const Eigen::VectorXd& t);

//! n draws of mu + R A S with A the symmetric root of sigma.
SampleMatrix sample_elliptical(const EllipticalSpec& spec, std::size_t n, RandomStream& rng);

//! One draw of the radial variable R for a d-dimensional spherical law.
double sample_radial(const CharGenerator& g, std::size_t d, RandomStream& rng);

class RadialDensity
{
public:
  RadialDensity(std::string family, std::function<double(double)> density);

  double operator()(double x) const { return density_(x); }
  const std::string& family() const { return family_; }
  //! Adaptive quadrature over (0, inf).
  double integral() const;

private:
  std::string family_;
  std::function<double(double)> density_;
};

//! Radial density of the d-dimensional spherical Laplace law with
//! generator (1 + u/2)^-1.
RadialDensity laplace_radial(std::size_t d);

//! (f_L(x) - sqrt(beta) f_L(x / sqrt(beta))) / (1 - beta), the radial density
//! of the sum of two independent spherical Laplace vectors with scales 1 and
//! sqrt(beta).
RadialDensity laplace_distorted_radial(double beta, std::size_t d);

} // namespace smoothcop
