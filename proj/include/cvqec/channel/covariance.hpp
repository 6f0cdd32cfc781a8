#pragma once

#include <Eigen/Dense>

namespace cvqec::channel {

// Two-mode covariance matrix in (x1, p1, x2, p2) ordering, vacuum variance 1.
class CovarianceMatrix4 {
 public:
  // Throws InvalidParameter unless `entries` is finite and symmetric within 1e-12.
  explicit CovarianceMatrix4(const Eigen::Matrix4d& entries);

  const Eigen::Matrix4d& entries() const noexcept { return sigma_; }
  double operator()(int i, int j) const { return sigma_(i, j); }

  Eigen::Matrix2d block_a() const { return sigma_.topLeftCorner<2, 2>(); }
  Eigen::Matrix2d block_b() const { return sigma_.bottomRightCorner<2, 2>(); }
  Eigen::Matrix2d block_c() const { return sigma_.topRightCorner<2, 2>(); }

  // Smallest eigenvalue of sigma + i Omega.
  double bona_fide_margin() const;
  bool is_bona_fide(double tolerance = -1e-9) const { return bona_fide_margin() >= tolerance; }

  // Smallest symplectic eigenvalue of the partially transposed matrix.
  double ppt_symplectic_min() const;

  static Eigen::Matrix4d symplectic_form();

 private:
  Eigen::Matrix4d sigma_;
};

}  // namespace cvqec::channel
