#include "cvqec/channel/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "cvqec/errors.hpp"

namespace cvqec::channel {

CovarianceMatrix4::CovarianceMatrix4(const Eigen::Matrix4d& entries) : sigma_(entries) {
  if (!sigma_.allFinite()) throw InvalidParameter("covariance matrix has non-finite entries");
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidParameter("covariance matrix is not symmetric");
  }
  sigma_ = 0.5 * (sigma_ + sigma_.transpose());
}

Eigen::Matrix4d CovarianceMatrix4::symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  return omega;
}

double CovarianceMatrix4::bona_fide_margin() const {
  const Eigen::Matrix4cd m = sigma_.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * symplectic_form();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double CovarianceMatrix4::ppt_symplectic_min() const {
  const double det_a = block_a().determinant();
  const double det_b = block_b().determinant();
  const double det_c = block_c().determinant();
  const double delta = det_a + det_b - 2.0 * det_c;
  const double disc = std::max(0.0, delta * delta - 4.0 * sigma_.determinant());
  return std::sqrt(std::max(0.0, 0.5 * (delta - std::sqrt(disc))));
}

}  // namespace cvqec::channel
