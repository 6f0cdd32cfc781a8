#pragma once

#include <complex>
#include <string>

#include "cvqec/fock/fock_operator.hpp"
#include "cvqec/protocol/moments.hpp"
#include "cvqec/protocol/params.hpp"

namespace cvqec::fock {

enum class Amplifier { quantum_scissor, ideal_gain };

// How the corrective displacement enters the beta-averaged moments.
//   physical: displace the Fock state at three gains and fit the exact quadratic.
//   shift: use D^+ a D = a + gamma on the undisplaced state (no extra truncation).
enum class DisplacementMethod { automatic, physical, shift };

struct PipelineOptions {
  int cutoff = 0;  // EPR-mode cutoff; 0 picks one from the geometric tail
  int quadrature_order = 40;
  DisplacementMethod displacement = DisplacementMethod::automatic;
  double lambda_step = 0.2;  // gain spacing for the physical fit
  // Contract the product coherent input before touching the EPR modes. Equivalent to
  // projecting the joint state, but an order of magnitude cheaper.
  bool factorized_projection = true;
};

// Brute-force tensor simulation of the full protocol:
//   coherent input on A, EPR pair on R/B, homodyne loss on A and R (R via mode E),
//   dual homodyne on A/R, channel loss on B, then either the quantum scissor
//   (ancilla D/C, 50:50 on B/D, herald D1 = D, D2 = B) or the ideal g^n amplifier.
class ProtocolPipeline {
 public:
  ProtocolPipeline(const protocol::ProtocolParams& params, Amplifier amplifier, PipelineOptions options = {});

  // Un-normalized output conditioned on outcome beta, before the displacement.
  FockOperator conditional_output(std::complex<double> beta) const;
  // The same state after D(lambda beta); out_cutoff 0 picks a safe size.
  FockOperator displaced_output(std::complex<double> beta, int out_cutoff = 0) const;

  protocol::MomentPolynomial moment_polynomial(Diagnostics* diagnostics = nullptr) const;

  const std::string& output_mode() const noexcept { return output_mode_; }
  int cutoff() const noexcept { return cutoff_; }
  const Diagnostics& diagnostics() const noexcept { return epr_.diagnostics(); }

 private:
  protocol::ProtocolParams params_;
  Amplifier amplifier_;
  PipelineOptions options_;
  int cutoff_ = 0;
  bool has_e_ = false;
  std::string output_mode_;
  FockOperator input_;    // coherent state on A
  FockOperator epr_;      // pure state over R, B (and E)
  FockOperator joint_;    // input_ x epr_, only built for the unfactorized path
  FockOperator ancilla_;  // density over D, C
};

// Default resource cutoff: the amplified EPR tail falls below 1e-12.
int resource_cutoff(const protocol::ProtocolParams& params, Amplifier amplifier);

// Herald weight of the amplification stage acting on the attenuated EPR arm alone,
// without any teleportation input.
double resource_herald_weight(const protocol::ProtocolParams& params, Amplifier amplifier, int cutoff = 0);

}  // namespace cvqec::fock
