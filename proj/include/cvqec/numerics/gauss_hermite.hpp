#pragma once

#include <complex>
#include <vector>

namespace cvqec::numerics {

// Nodes and weights for \int e^{-x^2} f(x) dx ~ sum_i w_i f(x_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int order);

// Tensor-product rule for complex-plane integrals
//   \int f(u) d^2u  with f(u) ~ e^{-kappa |u|^2} * smooth(u),  u = center + (x + i y)/sqrt(kappa).
// Each point carries the full weight w_i w_j e^{x_i^2 + y_j^2} / kappa, so callers integrate f itself.
struct PlanarPoint {
  std::complex<double> u;
  double weight;
};

std::vector<PlanarPoint> planar_rule(int order, double kappa, std::complex<double> center = {});

}  // namespace cvqec::numerics
