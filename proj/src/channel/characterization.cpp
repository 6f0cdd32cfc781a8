#include "cvqec/channel/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvqec/entanglement/geof.hpp"
#include "cvqec/errors.hpp"
#include "cvqec/protocol/analytic.hpp"

namespace cvqec::channel {
namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

MomentSource analytic_source(const protocol::ProtocolParams& params) {
  params.validate();
  return [params](std::complex<double> alpha) {
    protocol::ProtocolParams p = params;
    p.alpha = alpha;
    return protocol::moment_polynomial(p);
  };
}

MomentSource fock_source(const protocol::ProtocolParams& params, fock::Amplifier amplifier,
                         fock::PipelineOptions options) {
  params.validate();
  return [params, amplifier, options](std::complex<double> alpha) {
    protocol::ProtocolParams p = params;
    p.alpha = alpha;
    fock::Diagnostics diag;
    auto poly = fock::ProtocolPipeline(p, amplifier, options).moment_polynomial(&diag);
    for (const auto& w : diag.warnings) {
      if (w.rfind("cutoff-too-small", 0) == 0) throw NumericalFailure(w);
    }
    return poly;
  };
}

MomentSource synthetic_source(double eta, double noise) {
  return [eta, noise](std::complex<double> alpha) {
    protocol::MomentPolynomial poly;
    const double g = std::sqrt(eta);
    const double v = eta + noise;
    const double mx = 2.0 * g * alpha.real();
    const double mp = 2.0 * g * alpha.imag();
    poly.weight = 1.0;
    poly.x[0] = mx;
    poly.p[0] = mp;
    poly.x2[0] = v + mx * mx;
    poly.p2[0] = v + mp * mp;
    poly.xp[0] = mx * mp;
    return poly;
  };
}

ChannelProbe::ChannelProbe(const MomentSource& source, CharacterizationOptions options, bool imaginary_probe)
    : options_(options), imaginary_(imaginary_probe) {
  if (!(options_.probe > 0.0)) throw InvalidParameter("probe amplitude must be positive");
  const std::complex<double> unit = imaginary_ ? std::complex<double>(0.0, 1.0) : std::complex<double>(1.0, 0.0);
  first_ = source(options_.probe * unit);
  second_ = source(2.0 * options_.probe * unit);
  if (!(first_.weight > 0.0) || !(second_.weight > 0.0)) throw NumericalFailure("protocol has zero herald probability");
}

EffectiveChannel ChannelProbe::at(double lambda) const {
  const protocol::Moments m1 = first_.at(lambda);
  const protocol::Moments m2 = second_.at(lambda);
  const double a1 = options_.probe;
  const double gain1 = (imaginary_ ? m1.mean_p : m1.mean_x) / (2.0 * a1);
  const double gain2 = (imaginary_ ? m2.mean_p : m2.mean_x) / (4.0 * a1);
  const double variance = imaginary_ ? m1.variance_p : m1.variance_x;

  EffectiveChannel ch;
  ch.eta_eff = gain1 * gain1;
  ch.saturation_residual = gain1 != 0.0 ? std::abs(gain2 - gain1) / std::abs(gain1) : std::abs(gain2 - gain1);
  ch.added_noise = variance - ch.eta_eff;
  if (!std::isfinite(ch.eta_eff) || !std::isfinite(ch.added_noise)) throw NumericalFailure("non-finite channel estimate");
  if (ch.saturation_residual > options_.linearity_tolerance) {
    throw NonlinearChannel("probe gains differ by " + format("%.3g", ch.saturation_residual) +
                           "; use smaller probes or expect gain saturation");
  }
  if (ch.added_noise < 0.0) {
    if (ch.added_noise < -options_.noise_clamp) {
      throw InvalidChannel("negative added noise " + format("%.3g", ch.added_noise));
    }
    ch.added_noise = 0.0;
  }
  return ch;
}

EffectiveChannel characterize(const protocol::ProtocolParams& params, const CharacterizationOptions& options) {
  return ChannelProbe(analytic_source(params), options).at(params.lambda);
}

double phase_covariance_gap(const MomentSource& source, double lambda, const CharacterizationOptions& options) {
  const EffectiveChannel re = ChannelProbe(source, options, false).at(lambda);
  const EffectiveChannel im = ChannelProbe(source, options, true).at(lambda);
  return std::max(std::abs(re.eta_eff - im.eta_eff), std::abs(re.added_noise - im.added_noise));
}

CovarianceMatrix4 corrected_covariance(double zeta, const EffectiveChannel& channel) {
  if (!(zeta >= 0.0 && zeta < 1.0)) throw InvalidParameter("zeta must lie in [0, 1)");
  if (!(channel.eta_eff >= 0.0) || !std::isfinite(channel.added_noise)) throw InvalidParameter("malformed channel");
  const double r = std::atanh(zeta);
  const double ch = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  const double b = channel.eta_eff * ch + channel.added_noise;
  const double c = std::sqrt(channel.eta_eff) * sh;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(1, 1) = ch;
  m(2, 2) = m(3, 3) = b;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  CovarianceMatrix4 sigma(m);
  if (!sigma.is_bona_fide()) {
    throw InvalidChannel("corrected covariance is not bona fide (margin " + format("%.3g", sigma.bona_fide_margin()) + ")");
  }
  return sigma;
}

CovarianceMatrix4 loss_baseline(double zeta, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidParameter("eta must lie in [0, 1]");
  return corrected_covariance(zeta, EffectiveChannel{eta, 1.0 - eta, 0.0});
}

double deterministic_bound(double eta, double eta_max) {
  if (!(eta >= 0.0)) throw InvalidParameter("eta must be non-negative");
  if (eta > eta_max) throw InvalidParameter("deterministic bound diverges as eta -> 1");
  const double s = std::sqrt(eta);
  return entanglement::geof_of_r(0.5 * std::log((1.0 + s) / (1.0 - s)));
}

EffectiveChannel ideal_nla_reference(double chi, double eta, double g, double lambda, const CharacterizationOptions& options,
                                     fock::PipelineOptions pipeline) {
  protocol::ProtocolParams p;
  p.chi = chi;
  p.eta = eta;
  p.g = g;
  p.lambda = lambda;
  return ChannelProbe(fock_source(p, fock::Amplifier::ideal_gain, pipeline), options).at(lambda);
}

}  // namespace cvqec::channel
