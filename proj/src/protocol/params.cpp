#include "cvqec/protocol/params.hpp"

#include <cmath>

#include "cvqec/errors.hpp"

namespace cvqec::protocol {
namespace {

void require(bool ok, const char* message) {
  if (!ok) throw InvalidParameter(message);
}

}  // namespace

double ProtocolParams::nominal_lambda() const { return g * std::sqrt(eta) * chi; }

double ProtocolParams::g_from_xi(double xi) {
  require(xi > 0.0 && xi <= 0.5, "xi must lie in (0, 1/2] so that g >= 1");
  return std::sqrt((1.0 - xi) / xi);
}

void ProtocolParams::validate() const {
  require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  require(chi >= 0.0 && chi < 1.0, "chi must lie in [0, 1)");
  require(zeta >= 0.0 && zeta < 1.0, "zeta must lie in [0, 1)");
  require(std::isfinite(g) && g >= 1.0, "g must be finite and at least 1");
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be finite and non-negative");
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()), "alpha must be finite");
}

}  // namespace cvqec::protocol
