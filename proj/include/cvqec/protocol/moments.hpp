#pragma once

#include <array>
#include <complex>

namespace cvqec::protocol {

// Post-selected output statistics of the corrected channel for one probe.
struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
  double mean_xp = 0.0;  // symmetrized <(XP + PX)/2>
  double herald_probability = 0.0;
  double variance_x = 0.0;
  double variance_p = 0.0;
};

// beta-integrated, un-normalized moments of the displaced output as exact
// quadratics in the teleporter gain: value(lambda) = c[0] + c[1] lambda + c[2] lambda^2.
struct MomentPolynomial {
  double weight = 0.0;  // integral of the trace; independent of lambda
  std::array<double, 3> x{};
  std::array<double, 3> p{};
  std::array<double, 3> x2{};
  std::array<double, 3> p2{};
  std::array<double, 3> xp{};

  Moments at(double lambda) const;
};

// Adds w times the moments of D(lambda beta) rho D(lambda beta)^+ for a single-mode
// state with trace `trace`, <a> = a1, <a^2> = a2 and <a^+ a> = n.
void accumulate_displaced(MomentPolynomial& poly, double w, std::complex<double> beta, double trace,
                          std::complex<double> a1, std::complex<double> a2, double n);

}  // namespace cvqec::protocol
