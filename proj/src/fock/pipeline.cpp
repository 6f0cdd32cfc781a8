#include "cvqec/fock/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "cvqec/errors.hpp"
#include "cvqec/fock/ops.hpp"
#include "cvqec/numerics/gauss_hermite.hpp"
#include "cvqec/numerics/special.hpp"
#include "cvqec/protocol/analytic.hpp"
#include "tensor.hpp"

namespace cvqec::fock {
namespace {

FockOperator scissor_ancilla(const protocol::ProtocolParams& p) {
  FockOperator anc = to_density(tensor(make_fock("D", 1, 1), FockOperator::vacuum({"C"}, {1})));
  anc = apply_loss(anc, "D", p.epsilon);
  anc = apply_beamsplitter(anc, "D", "C", p.xi());
  return apply_loss(anc, "D", p.delta);
}

FockOperator apply_scissor(const FockOperator& rho_b, const FockOperator& ancilla, protocol::HeraldMode mode) {
  // Both accepted patterns carry one photon in total on B and D, and the mixer conserves
  // photon number, so levels above |1> on B cannot contribute. Dropping them is exact.
  FockOperator low_b = resize_cutoff(rho_b, "B", 1);
  low_b.diagnostics() = rho_b.diagnostics();
  const FockOperator mixed = apply_beamsplitter(tensor(low_b, ancilla), "B", "D", 0.5);
  HeraldOutcome accepted = herald_pattern(mixed, {{"B", 0}, {"D", 1}});
  if (mode == protocol::HeraldMode::both) {
    const HeraldOutcome mirrored = herald_pattern(mixed, {{"B", 1}, {"D", 0}});
    const FockOperator flipped = apply_phase(mirrored.state, "C", std::numbers::pi);
    for (std::size_t i = 0; i < accepted.state.data().size(); ++i) accepted.state.data()[i] += flipped.data()[i];
  }
  return std::move(accepted.state);
}

// <beta|_{AR} applied to |psi>_A |phi>_{R...}: first fold psi into the R weights.
FockOperator project_factorized(const FockOperator& input, const FockOperator& epr, std::complex<double> beta) {
  const int cut_a = input.cutoffs()[0];
  const int cut_r = epr.cutoffs()[0];
  const Eigen::MatrixXcd d = numerics::displacement_matrix(-beta, cut_r, cut_a);
  std::vector<Complex> w(static_cast<std::size_t>(cut_r) + 1, Complex{});
  for (int m = 0; m <= cut_r; ++m) {
    Complex acc{};
    for (int k = 0; k <= cut_a; ++k) acc += d(m, k) * input.data()[static_cast<std::size_t>(k)];
    w[static_cast<std::size_t>(m)] = acc / std::sqrt(std::numbers::pi);
  }
  detail::Tensor t = detail::contract_slot(detail::Tensor{epr.slot_dims(), epr.data()}, 0, w);
  std::vector<std::string> labels(epr.labels().begin() + 1, epr.labels().end());
  std::vector<int> cutoffs(epr.cutoffs().begin() + 1, epr.cutoffs().end());
  FockOperator out(std::move(labels), std::move(cutoffs), PayloadKind::pure_vector);
  out.data() = std::move(t.data);
  out.diagnostics() = epr.diagnostics();
  return out;
}

int displaced_cutoff(int in_cutoff, double gamma_abs) {
  return in_cutoff + static_cast<int>(std::ceil(gamma_abs * gamma_abs + 10.0 * gamma_abs + 12.0));
}

}  // namespace

int resource_cutoff(const protocol::ProtocolParams& p, Amplifier amplifier) {
  double q = p.chi * p.chi;
  if (amplifier == Amplifier::ideal_gain) q *= std::max(1.0, 1.0 - p.nu() + p.g * p.g * p.nu());
  if (!(q < 1.0)) throw InvalidParameter("amplified EPR tail does not converge");
  return default_cutoff(q);
}


ProtocolPipeline::ProtocolPipeline(const protocol::ProtocolParams& params, Amplifier amplifier, PipelineOptions options)
    : params_(params),
      amplifier_(amplifier),
      options_(options),
      input_(FockOperator::vacuum({}, {})),
      epr_(FockOperator::vacuum({}, {})),
      joint_(FockOperator::vacuum({}, {})),
      ancilla_(FockOperator::vacuum({}, {})) {
  params_.validate();
  if (options_.quadrature_order < 2) throw InvalidParameter("quadrature order must be at least 2");
  cutoff_ = options_.cutoff > 0 ? options_.cutoff : resource_cutoff(params_, amplifier_);
  output_mode_ = amplifier_ == Amplifier::quantum_scissor ? "C" : "B";

  FockOperator rbe = make_tmsv(params_.chi, cutoff_, "R", "B");
  has_e_ = params_.tau < 1.0;
  if (has_e_) {
    rbe = tensor(rbe, FockOperator::vacuum({"E"}, {cutoff_}));
    rbe = apply_beamsplitter(rbe, "R", "E", params_.tau);
  }
  const std::complex<double> a_in = std::sqrt(params_.tau) * params_.alpha;
  input_ = make_coherent("A", a_in, coherent_cutoff(a_in));
  epr_ = std::move(rbe);
  if (!options_.factorized_projection) joint_ = tensor(input_, epr_);
  if (amplifier_ == Amplifier::quantum_scissor) ancilla_ = scissor_ancilla(params_);
}

FockOperator ProtocolPipeline::conditional_output(std::complex<double> beta) const {
  FockOperator projected = options_.factorized_projection ? project_factorized(input_, epr_, beta)
                                                          : project_dual_homodyne(joint_, "A", "R", beta);
  FockOperator rho_b = has_e_ ? partial_trace(projected, {"E"}) : to_density(projected);
  rho_b = apply_loss(rho_b, "B", params_.nu());
  if (amplifier_ == Amplifier::ideal_gain) return apply_gain_operator(rho_b, "B", params_.g);
  return apply_scissor(rho_b, ancilla_, params_.herald);
}

FockOperator ProtocolPipeline::displaced_output(std::complex<double> beta, int out_cutoff) const {
  const FockOperator out = conditional_output(beta);
  const std::complex<double> gamma = params_.lambda * beta;
  const int in_cut = out.cutoffs()[0];
  return apply_displacement(out, output_mode_, gamma, out_cutoff > 0 ? out_cutoff : displaced_cutoff(in_cut, std::abs(gamma)));
}

protocol::MomentPolynomial ProtocolPipeline::moment_polynomial(Diagnostics* diagnostics) const {
  DisplacementMethod method = options_.displacement;
  if (method == DisplacementMethod::automatic) {
    method = amplifier_ == Amplifier::quantum_scissor ? DisplacementMethod::physical : DisplacementMethod::shift;
  }
  const double gain_sq = amplifier_ == Amplifier::ideal_gain ? params_.g * params_.g : 0.0;
  const double kappa = protocol::envelope_kappa(params_, gain_sq);
  const std::complex<double> v = std::sqrt(params_.tau) * params_.alpha;
  const auto rule = numerics::planar_rule(options_.quadrature_order, kappa);

  Diagnostics diag = epr_.diagnostics();
  protocol::MomentPolynomial poly;
  const double s = options_.lambda_step;
  // Integrated moments at lambda = 0, s, 2s for the physical fit.
  std::array<std::array<double, 6>, 3> sampled{};

  for (const auto& pt : rule) {
    const std::complex<double> beta = v - pt.u;
    const FockOperator out = conditional_output(beta);
    for (const auto& w : out.diagnostics().warnings) diag.warn(w);
    if (method == DisplacementMethod::shift) {
      const QuadratureMoments m = quadrature_moments(out, output_mode_);
      const std::complex<double> a1(0.5 * m.mean_x, 0.5 * m.mean_p);
      const std::complex<double> a2(0.25 * (m.mean_x2 - m.mean_p2), 0.5 * m.mean_xp);
      const double n = 0.25 * (m.mean_x2 + m.mean_p2 - 2.0 * m.weight);
      protocol::accumulate_displaced(poly, pt.weight, beta, m.weight, a1, a2, n);
      continue;
    }
    for (int j = 0; j < 3; ++j) {
      const std::complex<double> gamma = (j * s) * beta;
      const int in_cut = out.cutoffs()[0];
      const FockOperator shifted =
          j == 0 ? out : apply_displacement(out, output_mode_, gamma, displaced_cutoff(in_cut, std::abs(gamma)));
      if (j > 0) diag.truncated_weight += pt.weight * std::max(0.0, out.weight() - shifted.weight());
      const QuadratureMoments m = quadrature_moments(shifted, output_mode_);
      const std::array<double, 6> vals{m.weight, m.mean_x, m.mean_p, m.mean_x2, m.mean_p2, m.mean_xp};
      for (std::size_t k = 0; k < 6; ++k) sampled[static_cast<std::size_t>(j)][k] += pt.weight * vals[k];
    }
  }

  if (method == DisplacementMethod::physical) {
    auto fit = [&](std::size_t k) {
      const double f0 = sampled[0][k], f1 = sampled[1][k], f2 = sampled[2][k];
      const double c2 = (f2 - 2.0 * f1 + f0) / (2.0 * s * s);
      const double c1 = (f1 - f0) / s - c2 * s;
      return std::array<double, 3>{f0, c1, c2};
    };
    poly.weight = sampled[0][0];
    poly.x = fit(1);
    poly.p = fit(2);
    poly.x2 = fit(3);
    poly.p2 = fit(4);
    poly.xp = fit(5);
  }
  if (diagnostics != nullptr) *diagnostics = diag;
  return poly;
}

double resource_herald_weight(const protocol::ProtocolParams& params, Amplifier amplifier, int cutoff) {
  params.validate();
  const int cut = cutoff > 0 ? cutoff : resource_cutoff(params, amplifier);
  FockOperator rho_b = partial_trace(make_tmsv(params.chi, cut, "R", "B"), {"R"});
  rho_b = apply_loss(rho_b, "B", params.nu());
  if (amplifier == Amplifier::ideal_gain) return apply_gain_operator(rho_b, "B", params.g).weight();
  return apply_scissor(rho_b, scissor_ancilla(params), params.herald).weight();
}

}  // namespace cvqec::fock
