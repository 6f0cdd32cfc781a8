#include "cvqec/numerics/gauss_hermite.hpp"

#include <cmath>
#include <memory>

#include <gsl/gsl_integration.h>

#include "cvqec/errors.hpp"

namespace cvqec::numerics {

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw InvalidParameter("Gauss-Hermite order must be >= 1");
  // Weight e^{-b (x - a)^2} with a = 0, b = 1.
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, static_cast<std::size_t>(order), 0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw NumericalFailure("could not build Gauss-Hermite rule");
  const double* nodes = gsl_integration_fixed_nodes(ws.get());
  const double* weights = gsl_integration_fixed_weights(ws.get());
  GaussHermiteRule rule;
  rule.nodes.assign(nodes, nodes + order);
  rule.weights.assign(weights, weights + order);
  return rule;
}

std::vector<PlanarPoint> planar_rule(int order, double kappa, std::complex<double> center) {
  if (!(kappa > 0.0)) throw InvalidParameter("planar quadrature needs a positive Gaussian width");
  const auto rule = gauss_hermite(order);
  const double scale = 1.0 / std::sqrt(kappa);
  std::vector<PlanarPoint> points;
  points.reserve(static_cast<std::size_t>(order) * order);
  for (int i = 0; i < order; ++i) {
    const double xi = rule.nodes[i];
    for (int j = 0; j < order; ++j) {
      const double yj = rule.nodes[j];
      const double w = rule.weights[i] * rule.weights[j] * std::exp(xi * xi + yj * yj) / kappa;
      points.push_back({center + std::complex<double>(xi, yj) * scale, w});
    }
  }
  return points;
}

}  // namespace cvqec::numerics
