#pragma once

#include <Eigen/Dense>

namespace smoothcop {

//! Rows are observations, columns are coordinates.
using SampleMatrix = Eigen::MatrixXd;
using BandwidthMatrix = Eigen::MatrixXd;

//! Symmetric square root A with A * A = S. Small negative eigenvalues from
//! rounding are clamped to zero, so positive semidefinite input is accepted.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& s);

bool is_symmetric(const Eigen::MatrixXd& s, double tol = 1e-10);
bool is_spd(const Eigen::MatrixXd& s);

Eigen::VectorXd column_means(const SampleMatrix& x);
//! Unbiased sample covariance (denominator n - 1).
Eigen::MatrixXd sample_covariance(const SampleMatrix& x);
Eigen::MatrixXd covariance_to_correlation(const Eigen::MatrixXd& cov);

} // namespace smoothcop
