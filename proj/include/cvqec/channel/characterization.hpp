#pragma once

#include <complex>
#include <functional>

#include "cvqec/channel/covariance.hpp"
#include "cvqec/fock/pipeline.hpp"
#include "cvqec/protocol/moments.hpp"
#include "cvqec/protocol/params.hpp"

namespace cvqec::channel {

struct EffectiveChannel {
  double eta_eff = 0.0;
  double added_noise = 0.0;          // output variance beyond eta_eff (shot-noise units)
  double saturation_residual = 0.0;  // relative gain change between the two probes
};

struct CharacterizationOptions {
  double probe = 0.1;                 // alpha_1; the second probe is 2 alpha_1
  double linearity_tolerance = 0.01;  // on the relative gain difference
  double noise_clamp = 1e-9;          // added noise in [-clamp, 0) is reported as 0
};

// Beta-integrated moments of the protocol for a given probe amplitude.
using MomentSource = std::function<protocol::MomentPolynomial(std::complex<double> alpha)>;

MomentSource analytic_source(const protocol::ProtocolParams& params);
MomentSource fock_source(const protocol::ProtocolParams& params, fock::Amplifier amplifier,
                         fock::PipelineOptions options = {});
// Phase-insensitive Gaussian channel (eta, noise), for round-trip checks.
MomentSource synthetic_source(double eta, double noise);

// Probes a moment source once per amplitude and reads the channel off at any gain.
class ChannelProbe {
 public:
  ChannelProbe(const MomentSource& source, CharacterizationOptions options = {}, bool imaginary_probe = false);

  // Throws NonlinearChannel when the two probes disagree on the gain beyond tolerance.
  EffectiveChannel at(double lambda) const;
  double herald_probability() const noexcept { return first_.weight; }

  const CharacterizationOptions& options() const noexcept { return options_; }

 private:
  CharacterizationOptions options_;
  bool imaginary_;
  protocol::MomentPolynomial first_, second_;
};

EffectiveChannel characterize(const protocol::ProtocolParams& params, const CharacterizationOptions& options = {});

// Largest difference in (eta_eff, added_noise) between real and imaginary probes.
double phase_covariance_gap(const MomentSource& source, double lambda, const CharacterizationOptions& options = {});

CovarianceMatrix4 corrected_covariance(double zeta, const EffectiveChannel& channel);
CovarianceMatrix4 loss_baseline(double zeta, double eta);

// GEOF of an infinitely squeezed EPR arm through loss eta; errors above eta_max.
double deterministic_bound(double eta, double eta_max = 1.0 - 1e-9);

// Channel obtained with the ideal g^n amplifier in place of the scissor.
EffectiveChannel ideal_nla_reference(double chi, double eta, double g, double lambda,
                                     const CharacterizationOptions& options = {}, fock::PipelineOptions pipeline = {});

}  // namespace cvqec::channel
