#pragma once

#include <span>
#include <vector>

namespace smoothcop {

//! Ranks 1..n, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

double mean(std::span<const double> x);
//! Sample variance with denominator n - 1.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
//! Linear-interpolation quantile (type 7); NaN entries are ignored.
double quantile(std::vector<double> x, double p);
double median(std::vector<double> x);

struct KsResult
{
  double statistic;
  double p_value;
};

//! One-sample Kolmogorov-Smirnov test against U(0, 1). The p-value uses the
//! Kolmogorov limit law with Stephens' finite-sample correction.
KsResult ks_test_uniform(std::span<const double> x);
double kolmogorov_survival(double lambda);

} // namespace smoothcop
