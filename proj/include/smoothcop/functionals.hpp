#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smoothcop/linalg.hpp"
#include "smoothcop/polygon.hpp"

namespace smoothcop {

struct DiagonalCurve
{
  std::vector<double> u_grid;
  std::vector<double> values;
};

//! Pearson correlation of the column ranks (first two columns).
double sample_rho_s(const SampleMatrix& data);
//! (concordant - discordant) / (n choose 2) on the first two columns; tied
//! pairs count as neither. Uses the merge-count path above 5000 rows.
double sample_tau(const SampleMatrix& data);
double kendall_tau_pairwise(std::span<const double> x, std::span<const double> y);
double kendall_tau_merge(std::span<const double> x, std::span<const double> y);

//! Per-observation (concordant - discordant) / (n - 1). Their mean is the
//! tau estimate and 4 var / n estimates its sampling variance.
std::vector<double> kendall_influence(std::span<const double> x, std::span<const double> y);

//! Marching-squares level lines of a field sampled on grid x grid, with
//! field(a, b) at (grid[a], grid[b]). Returns every connected polyline.
std::vector<PolygonChain> contour_lines(const Eigen::MatrixXd& field,
                                        std::span<const double> grid,
                                        double level);

//! Boundary of the empirical-copula sublevel set at level t: contour on a
//! grid_n x grid_n grid, coordinates below t raised to t, anchored at
//! (t, 1) and (1, t).
PolygonChain estimate_level_boundary(const SampleMatrix& data_u, double t, std::size_t grid_n = 200);

//! Largest distance from a vertex of `a` to the polyline `b` (segments included).
double directed_hausdorff(const PolygonChain& a, const PolygonChain& b, std::uint64_t seed = 0);
double hausdorff_distance(const PolygonChain& a, const PolygonChain& b);
//! Reference implementation: full double loop without early exit.
double hausdorff_brute_force(const PolygonChain& a, const PolygonChain& b);
double point_segment_distance(const Point2& p, const Point2& s0, const Point2& s1);

DiagonalCurve empirical_diagonal(const SampleMatrix& data_u, std::span<const double> u_grid);

} // namespace smoothcop
