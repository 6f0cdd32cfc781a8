#pragma once

#include <functional>

#include <Eigen/Dense>

namespace cvqec::numerics {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free minimization (Nelder-Mead simplex) from x0 with initial step `step`.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          double step, int max_iterations = 2000, double size_tolerance = 1e-10);

struct LineResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

// Golden-section minimization of f on [lo, hi] given an interior point `guess` with
// f(guess) below both ends. Stops once the bracket is narrower than rel_tol * |x|.
LineResult golden_section(const std::function<double(double)>& f, double lo, double guess, double hi,
                          double rel_tol = 1e-4, int max_iterations = 200);

}  // namespace cvqec::numerics
