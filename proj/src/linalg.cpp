#include "smoothcop/linalg.hpp"

#include <stdexcept>

namespace smoothcop {

Eigen::MatrixXd
symmetric_sqrt(const Eigen::MatrixXd& s)
{
  if (s.rows() != s.cols())
    throw std::invalid_argument("symmetric_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success)
    throw std::invalid_argument("symmetric_sqrt: eigendecomposition failed");
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd a =
    eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (a + a.transpose());
}

bool
is_symmetric(const Eigen::MatrixXd& s, double tol)
{
  if (s.rows() != s.cols())
    return false;
  double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool
is_spd(const Eigen::MatrixXd& s)
{
  if (s.size() == 0 || !is_symmetric(s))
    return false;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > 0.0;
}

Eigen::VectorXd
column_means(const SampleMatrix& x)
{
  return x.colwise().mean().transpose();
}

Eigen::MatrixXd
sample_covariance(const SampleMatrix& x)
{
  if (x.rows() < 2)
    throw std::invalid_argument("sample_covariance: need at least two rows");
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(x.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

Eigen::MatrixXd
covariance_to_correlation(const Eigen::MatrixXd& cov)
{
  Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
  return inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
}

} // namespace smoothcop
