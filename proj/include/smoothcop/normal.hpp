#pragma once

namespace smoothcop {

double norm_pdf(double x);
double norm_cdf(double x);
//! Standard normal quantile; p must lie in (0, 1).
double norm_quantile(double p);

//! P(X <= x, Y <= y) for a standard bivariate normal with correlation r.
//! Gauss-Legendre evaluation of the Drezner-Wesolowsky/Genz integral form,
//! accurate to about 1e-15. Infinite limits are allowed.
double bvn_cdf(double x, double y, double r);

} // namespace smoothcop
