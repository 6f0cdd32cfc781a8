#include "cvqec/entanglement/geof.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "cvqec/errors.hpp"
#include "cvqec/numerics/optimize.hpp"

namespace cvqec::entanglement {
namespace {

using Eigen::Matrix2d;
using Eigen::Matrix4d;
using Eigen::Vector3d;
using Eigen::VectorXd;

Matrix2d rotation(double theta) {
  Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Matrix2d psd_power(const Matrix2d& m, double power) {
  const Eigen::SelfAdjointEigenSolver<Matrix2d> es(m);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::Vector2d p;
  for (int i = 0; i < 2; ++i) p(i) = ev(i) > 0.0 ? std::pow(ev(i), power) : 0.0;
  return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().transpose();
}

// Local symplectic reduction to A = a I, B = b I, C = diag(c1, c2).
struct StandardForm {
  double a, b, c1, c2;
};

StandardForm standard_form(const channel::CovarianceMatrix4& sigma) {
  const Matrix2d A = sigma.block_a();
  const Matrix2d B = sigma.block_b();
  const Matrix2d C = sigma.block_c();
  // S A S^T = sqrt(det A) I with S = (det A)^{1/4} A^{-1/2}, which has unit determinant.
  const Matrix2d sa = std::pow(A.determinant(), 0.25) * psd_power(A, -0.5);
  const Matrix2d sb = std::pow(B.determinant(), 0.25) * psd_power(B, -0.5);
  const Matrix2d c = sa * C * sb.transpose();

  const Eigen::JacobiSVD<Matrix2d> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector2d s = svd.singularValues();
  // Only rotations are symplectic; push any reflection into the sign of c2.
  if (svd.matrixU().determinant() < 0.0) s(1) = -s(1);
  if (svd.matrixV().determinant() < 0.0) s(1) = -s(1);
  return {std::sqrt(A.determinant()), std::sqrt(B.determinant()), s(0), s(1)};
}

// Pure states X (+) X^{-1} with Sigma_p^{-1} <= X <= Sigma_x, parametrized as
// X = L + D^{1/2} W D^{1/2} and W = Q(theta) diag(sin^2 p1, sin^2 p2) Q^T.
class ReducedSearch {
 public:
  explicit ReducedSearch(const StandardForm& f) {
    Matrix2d sx, sp;
    sx << f.a, f.c1, f.c1, f.b;
    sp << f.a, f.c2, f.c2, f.b;
    sigma_x_ = sx;
    lower_ = sp.inverse();
    // Sigma_x - Sigma_p^{-1} is often rank one (pure loss). Round-off leaves a tiny
    // eigenvalue whose square root would open a spurious direction of size ~1e-8.
    const Eigen::SelfAdjointEigenSolver<Matrix2d> es(sx - lower_);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(sx.norm(), lower_.norm());
    Eigen::Vector2d ev;
    for (int i = 0; i < 2; ++i) ev(i) = es.eigenvalues()(i) > floor ? std::sqrt(es.eigenvalues()(i)) : 0.0;
    d_half_ = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  }

  Matrix2d point(const Vector3d& q) const {
    const Matrix2d rot = rotation(q(0));
    Eigen::Vector2d diag(std::pow(std::sin(q(1)), 2), std::pow(std::sin(q(2)), 2));
    const Matrix2d w = rot * diag.asDiagonal() * rot.transpose();
    return lower_ + d_half_ * w * d_half_;
  }

  // Positive when the pure state at q has tanh(2r) below k.
  double slack(const Vector3d& q, double k) const {
    const Matrix2d x = point(q);
    return k * std::sqrt(std::max(0.0, x(0, 0) * x(1, 1))) - std::abs(x(0, 1));
  }

  double upper_k() const {
    auto corr = [](const Matrix2d& x) { return std::abs(x(0, 1)) / std::sqrt(x(0, 0) * x(1, 1)); };
    return std::min(corr(sigma_x_), corr(lower_));
  }

 private:
  Matrix2d sigma_x_, lower_, d_half_;
};

Matrix4d tmsv_covariance(double r) {
  const double ch = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  Matrix4d m = Matrix4d::Zero();
  m.diagonal().setConstant(ch);
  m(0, 2) = m(2, 0) = sh;
  m(1, 3) = m(3, 1) = -sh;
  return m;
}

Matrix2d single_mode_symplectic(double theta, double s, double phi) {
  return rotation(theta) * Eigen::Vector2d(std::exp(s), std::exp(-s)).asDiagonal() * rotation(phi);
}

struct Feasibility {
  bool feasible;
  double value;
  VectorXd best;
  int evaluations;
};

// Maximizes `slack` over parameters by simplex search from several starts.
template <class Slack>
Feasibility maximize_slack(const Slack& slack, const std::vector<VectorXd>& starts, double margin) {
  Feasibility out{false, -std::numeric_limits<double>::infinity(), starts.front(), 0};
  for (const auto& x0 : starts) {
    int evals = 0;
    auto neg = [&](const VectorXd& x) {
      ++evals;
      return -slack(x);
    };
    const auto res = numerics::nelder_mead(neg, x0, 0.4, 600, 1e-9);
    out.evaluations += evals;
    if (-res.value > out.value) {
      out.value = -res.value;
      out.best = res.x;
    }
    if (out.value >= margin) break;
  }
  out.feasible = out.value >= margin;
  return out;
}

// Bisection on r over [r_lo, r_hi] after checking that r_hi is feasible and r_lo is not.
GEOFResult bisect(double r_lo, double r_hi, const std::function<Feasibility(double, const VectorXd*)>& feasible,
                  const GeofOptions& options, const VectorXd* warm_start = nullptr) {
  GEOFResult result;
  result.method = GeofMethod::optimized;

  const Feasibility at_top = feasible(r_hi, warm_start);
  result.report.evaluations += at_top.evaluations;
  if (!at_top.feasible) throw NumericalFailure("GEOF bracket invalid: upper squeezing is not feasible");
  const Feasibility at_bottom = feasible(r_lo, warm_start);
  result.report.evaluations += at_bottom.evaluations;
  if (at_bottom.feasible) {
    if (r_lo == 0.0) throw NumericalFailure("GEOF bracket invalid: state is PPT-entangled but looks separable");
    return bisect(0.0, r_lo, feasible, options, &at_bottom.best);
  }

  double lo = r_lo;
  double hi = r_hi;
  VectorXd warm = at_top.best;
  double residual = at_top.value;
  while (hi - lo > options.r_tolerance) {
    ++result.report.iterations;
    if (result.report.iterations > 200) throw NumericalFailure("GEOF bisection did not terminate");
    const double mid = 0.5 * (lo + hi);
    const Feasibility f = feasible(mid, &warm);
    result.report.evaluations += f.evaluations;
    if (f.feasible) {
      hi = mid;
      warm = f.best;
      residual = f.value;
    } else {
      lo = mid;
    }
  }
  result.r0 = hi;
  result.value = geof_of_r(hi);
  result.report.residual = residual;
  result.report.bracket_width = hi - lo;
  return result;
}

}  // namespace

double geof_of_r(double r0) {
  if (!(r0 >= 0.0) || !std::isfinite(r0)) throw InvalidParameter("squeezing must be finite and non-negative");
  if (r0 == 0.0) return 0.0;
  const double s = std::pow(std::sinh(r0), 2);
  const double c = 1.0 + s;
  return (c * std::log1p(s) - s * std::log(s)) / std::numbers::ln2;
}

double r0_lossy_tmsv(double zeta, double eta) {
  if (!(zeta >= 0.0 && zeta < 1.0)) throw InvalidParameter("zeta must lie in [0, 1)");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidParameter("eta must lie in [0, 1]");
  const double x = zeta * std::sqrt(eta);
  return 0.5 * std::log((1.0 + x) / (1.0 - x));
}

GEOFResult geof_from_cov(const channel::CovarianceMatrix4& sigma, const GeofOptions& options) {
  if (!sigma.is_bona_fide()) throw InvalidParameter("covariance matrix violates the bona-fide condition");
  if (sigma.ppt_symplectic_min() >= 1.0) return GEOFResult{};  // separable

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  const int restarts = std::max(1, options.restarts);

  if (!options.general_search) {
    const ReducedSearch search(standard_form(sigma));
    std::vector<VectorXd> random_starts;
    for (int i = 0; i < restarts; ++i) random_starts.push_back(Vector3d(angle(rng), angle(rng), angle(rng)));
    auto feasible = [&](double r, const VectorXd* warm) {
      const double k = std::tanh(2.0 * r);
      std::vector<VectorXd> starts;
      if (warm != nullptr) starts.push_back(*warm);
      starts.insert(starts.end(), random_starts.begin(), random_starts.end());
      return maximize_slack([&](const VectorXd& q) { return search.slack(q, k); }, starts, options.feasibility_margin);
    };
    const double k_hi = search.upper_k();
    if (!(k_hi < 1.0)) throw NumericalFailure("standard-form bracket is degenerate");

    // Locate the least-entangled decomposition directly, then confirm it with a narrow
    // bisection bracket. A failed lower check falls back to the full bracket.
    double k_best = k_hi;
    VectorXd q_best = random_starts.front();
    for (const auto& x0 : random_starts) {
      const auto res = numerics::nelder_mead(
          [&](const VectorXd& q) {
            const Matrix2d x = search.point(q);
            return x(0, 1) * x(0, 1) / (x(0, 0) * x(1, 1));
          },
          x0, 0.4, 2000, 1e-12);
      const double k = std::sqrt(std::max(0.0, res.value));
      if (k < k_best) {
        k_best = k;
        q_best = res.x;
      }
    }
    const double r_star = 0.5 * std::atanh(k_best);
    const double r_top = 0.5 * std::atanh(k_hi) + options.r_tolerance;
    const double r_hi = std::min(r_top, r_star + options.r_tolerance);
    const double r_lo = std::max(0.0, r_star - options.r_tolerance);
    return bisect(r_lo, r_hi, feasible, options, &q_best);
  }

  // General search: sigma - (S1 + S2) sigma_{r'} (S1 + S2)^T >= 0 with r' = r sin^2(t).
  const Matrix4d s = sigma.entries();
  std::normal_distribution<double> squeeze(0.0, 0.5);
  std::vector<VectorXd> random_starts;
  for (int i = 0; i < restarts; ++i) {
    VectorXd x(7);
    x << angle(rng), squeeze(rng), angle(rng), angle(rng), squeeze(rng), angle(rng), 0.5 * std::numbers::pi;
    random_starts.push_back(x);
  }
  auto feasible = [&](double r, const VectorXd* warm) {
    auto slack = [&](const VectorXd& x) {
      Matrix4d local = Matrix4d::Zero();
      local.topLeftCorner<2, 2>() = single_mode_symplectic(x(0), x(1), x(2));
      local.bottomRightCorner<2, 2>() = single_mode_symplectic(x(3), x(4), x(5));
      const double rr = r * std::pow(std::sin(x(6)), 2);
      const Matrix4d diff = s - local * tmsv_covariance(rr) * local.transpose();
      return Eigen::SelfAdjointEigenSolver<Matrix4d>(diff, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    };
    std::vector<VectorXd> starts;
    if (warm != nullptr) starts.push_back(*warm);
    starts.insert(starts.end(), random_starts.begin(), random_starts.end());
    return maximize_slack(slack, starts, options.feasibility_margin);
  };
  // The standard-form endpoint X = Sigma_x is a valid decomposition, so its squeezing bounds r0.
  const double r_hi = 0.5 * std::atanh(ReducedSearch(standard_form(sigma)).upper_k()) + 0.05;
  return bisect(0.0, r_hi, feasible, options);
}

}  // namespace cvqec::entanglement
