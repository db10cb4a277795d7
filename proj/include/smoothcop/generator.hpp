#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace smoothcop {

enum class GeneratorFamily
{
  gauss,
  laplace,
  cauchy,
  student_t,
  stable,
  composite
};

//! Characteristic generator psi of an elliptical law, so that the
//! characteristic function is exp(i t'mu) psi(t' Sigma t).
class CharGenerator
{
public:
  static CharGenerator gauss();
  static CharGenerator laplace();
  static CharGenerator cauchy();
  static CharGenerator student_t(double nu);
  //! Symmetric alpha-stable, psi(u) = exp(-u^(alpha/2)), alpha in (0, 2].
  static CharGenerator stable(double alpha);
  //! Accepts "gauss", "laplace", "cauchy", "student_t:<nu>", "stable:<alpha>".
  static CharGenerator parse(std::string_view name);

  //! Wraps an arbitrary generator; deriv_at_zero may be -infinity.
  static CharGenerator custom(std::string name,
                              std::function<double(double)> fn,
                              double deriv_at_zero);

  double operator()(double u) const;
  double deriv_at_zero() const { return deriv0_; }
  bool finite_variance() const;

  GeneratorFamily family() const { return family_; }
  double parameter() const { return param_; }
  const std::string& name() const { return name_; }

  //! u -> psi(scale * u).
  CharGenerator rescaled(double scale) const;

private:
  CharGenerator(GeneratorFamily family,
                double param,
                std::string name,
                std::function<double(double)> fn,
                double deriv0);

  GeneratorFamily family_;
  double param_;
  std::string name_;
  std::function<double(double)> fn_;
  double deriv0_;
};

double eval_generator(const CharGenerator& g, double u);

//! K_{r+1/2}(t) from the finite half-integer series.
double bessel_k_half(int r, double t);

//! K_alpha(t) by oscillatory quadrature of the Fourier-cosine integral
//! (2/t)^alpha Gamma(alpha + 1/2) / sqrt(pi) int_0^inf (1+x^2)^-(alpha+1/2) cos(t x) dx.
double bessel_k_integral(double alpha, double t);

//! psi_Z(u) = gx(u) gy(c u).
CharGenerator product_generator(const CharGenerator& gx,
                                const CharGenerator& gy,
                                double c);

struct ClosureDefect
{
  double defect;
  double gamma;
};

//! min over gamma of max over the grid of |g(u) g(c u) - g(gamma u)|.
ClosureDefect closure_defect(const CharGenerator& g,
                             double c,
                             std::span<const double> grid);

} // namespace smoothcop
