#include "cvqec/numerics/optimize.hpp"

#include <cmath>
#include <memory>
#include <mutex>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include "cvqec/errors.hpp"

namespace cvqec::numerics {
namespace {

// GSL aborts on errors by default; statuses are checked explicitly instead.
// The handler is process-global, so it is switched off exactly once.
void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          double step, int max_iterations, double size_tolerance) {
  const auto n = static_cast<std::size_t>(x0.size());
  if (n == 0) throw InvalidParameter("simplex search needs at least one parameter");
  disable_gsl_abort();

  struct Context {
    const std::function<double(const Eigen::VectorXd&)>* f;
    Eigen::VectorXd scratch;
  } ctx{&f, Eigen::VectorXd(x0.size())};

  gsl_multimin_function fn;
  fn.n = n;
  fn.params = &ctx;
  fn.f = [](const gsl_vector* v, void* p) {
    auto* c = static_cast<Context*>(p);
    for (Eigen::Index i = 0; i < c->scratch.size(); ++i) c->scratch(i) = gsl_vector_get(v, static_cast<std::size_t>(i));
    const double y = (*c->f)(c->scratch);
    return std::isfinite(y) ? y : GSL_POSINF;
  };

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> steps(gsl_vector_alloc(n), &gsl_vector_free);
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0(static_cast<Eigen::Index>(i)));
  gsl_vector_set_all(steps.get(), step);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
  if (gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), steps.get()) != GSL_SUCCESS) {
    throw NumericalFailure("simplex search could not be initialized");
  }

  SimplexResult result;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && result.iterations < max_iterations) {
    ++result.iterations;
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tolerance);
  }
  result.converged = status == GSL_SUCCESS;
  result.value = gsl_multimin_fminimizer_minimum(s.get());
  result.x.resize(x0.size());
  const gsl_vector* best = gsl_multimin_fminimizer_x(s.get());
  for (std::size_t i = 0; i < n; ++i) result.x(static_cast<Eigen::Index>(i)) = gsl_vector_get(best, i);
  return result;
}

LineResult golden_section(const std::function<double(double)>& f, double lo, double guess, double hi, double rel_tol,
                          int max_iterations) {
  disable_gsl_abort();
  gsl_function fn;
  fn.params = const_cast<std::function<double(double)>*>(&f);
  fn.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };

  std::unique_ptr<gsl_min_fminimizer, decltype(&gsl_min_fminimizer_free)> s(
      gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection), &gsl_min_fminimizer_free);
  if (gsl_min_fminimizer_set(s.get(), &fn, guess, lo, hi) != GSL_SUCCESS) {
    throw NumericalFailure("golden-section bracket does not enclose a minimum");
  }
  LineResult result;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && result.iterations < max_iterations) {
    ++result.iterations;
    if (gsl_min_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    status = gsl_min_test_interval(gsl_min_fminimizer_x_lower(s.get()), gsl_min_fminimizer_x_upper(s.get()), 0.0, rel_tol);
  }
  result.x = gsl_min_fminimizer_x_minimum(s.get());
  result.value = gsl_min_fminimizer_f_minimum(s.get());
  return result;
}

}  // namespace cvqec::numerics
