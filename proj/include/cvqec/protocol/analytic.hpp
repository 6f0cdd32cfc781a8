#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cvqec/protocol/moments.hpp"
#include "cvqec/protocol/params.hpp"

namespace cvqec::protocol {

// Un-normalized scissor output on span{|0>, |1>} of mode C for one homodyne outcome,
// before the corrective displacement. rho10 is the |1><0| coefficient.
struct HeraldedQubitBlock {
  std::complex<double> rho00;
  std::complex<double> rho01;
  std::complex<double> rho10;
  std::complex<double> rho11;
  std::complex<double> displacement;  // lambda * beta, applied after the block
  std::complex<double> beta;
  double weight = 0.0;

  Eigen::Matrix2cd matrix() const;
};

// Number of terms kept in the chi^2 series.
int series_order(double chi);

// Power-series coefficients in |u|^2 (u = sqrt(tau) alpha - beta) of the block entries:
//   rho00 = pref e^{-|u|^2} sum a_k |u|^{2k},   rho11 = pref e^{-|u|^2} sum b_k |u|^{2k},
//   rho10 = pref e^{-|u|^2} u sum c_k |u|^{2k}.
struct BlockSeries {
  double prefactor = 0.0;
  std::vector<double> a, b, c;
};

BlockSeries block_series(const ProtocolParams& params, int s_max = 0);

HeraldedQubitBlock rho_out(const ProtocolParams& params, std::complex<double> beta, int s_max = 0);

// Closed-form beta integrals of the displaced block's moments.
MomentPolynomial moment_polynomial(const ProtocolParams& params, int s_max = 0);

// Same integrals by Gauss-Hermite quadrature over rho_out; used as a numerical cross-check.
MomentPolynomial moment_polynomial_quadrature(const ProtocolParams& params, int order = 40, int s_max = 0);

Moments moments_beta_averaged(const ProtocolParams& params, int s_max = 0);

// Herald probability of the scissor acting on the attenuated EPR arm; alpha, lambda
// and tau do not enter.
double success_probability(const ProtocolParams& params);

// Width parameter of the Gaussian envelope in u of the heralded trace, used to scale
// quadrature nodes. `gain_sq` is g^2 for the ideal amplifier and 0 for the scissor.
double envelope_kappa(const ProtocolParams& params, double gain_sq = 0.0);

}  // namespace cvqec::protocol
