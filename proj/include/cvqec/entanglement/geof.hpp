#pragma once

#include <cstdint>
#include <string>

#include "cvqec/channel/covariance.hpp"

namespace cvqec::entanglement {

// Entanglement (ebits) of a pure two-mode squeezed state with squeezing r.
double geof_of_r(double r0);

// Optimal squeezing for a TMSV of parameter zeta with one arm through loss eta.
double r0_lossy_tmsv(double zeta, double eta);

enum class GeofMethod { closed_form, optimized };

struct OptimizerReport {
  int iterations = 0;          // outer bisection steps
  int evaluations = 0;         // inner objective evaluations
  double residual = 0.0;       // inner feasibility value at the returned point
  double bracket_width = 0.0;  // final width of the squeezing bracket
};

struct GEOFResult {
  double value = 0.0;
  double r0 = 0.0;
  GeofMethod method = GeofMethod::closed_form;
  OptimizerReport report;
};

struct GeofOptions {
  double r_tolerance = 1e-6;
  int restarts = 8;
  double feasibility_margin = -1e-9;
  std::uint64_t seed = 20170101;
  // Search all local symplectics against TMSV references instead of the
  // reduced standard-form parametrization. Slower; for cross-checks.
  bool general_search = false;
};

GEOFResult geof_from_cov(const channel::CovarianceMatrix4& sigma, const GeofOptions& options = {});

}  // namespace cvqec::entanglement
