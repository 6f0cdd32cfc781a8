#pragma once

#include <complex>

namespace cvqec::protocol {

// Which detection patterns count as a successful scissor event. `both` adds the
// mirrored pattern after undoing its pi phase flip, doubling the herald weight.
enum class HeraldMode { single, both };

struct ProtocolParams {
  double eta = 0.01;    // channel transmission
  double chi = 0.5;     // teleporter EPR parameter
  double zeta = 0.5;    // diagnostic EPR parameter, only used for covariance assembly
  double g = 1.0;       // NLA amplitude gain
  double tau = 1.0;     // homodyne efficiency
  double epsilon = 1.0; // single-photon source efficiency
  double delta = 1.0;   // single-photon detector efficiency
  double lambda = 0.0;  // classical teleportation gain
  std::complex<double> alpha{};
  HeraldMode herald = HeraldMode::single;

  // Scissor beam-splitter ratio, 1 / (1 + g^2).
  double xi() const noexcept { return 1.0 / (1.0 + g * g); }
  // Transmission seen by the amplified arm once detector loss is folded in.
  double nu() const noexcept { return eta * delta; }
  // Teleporter gain that is optimal for the ideal protocol, g sqrt(eta) chi.
  double nominal_lambda() const;

  void validate() const;

  static double g_from_xi(double xi);
};

}  // namespace cvqec::protocol
