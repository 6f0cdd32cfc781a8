#include "cvqec/fock/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "cvqec/errors.hpp"
#include "cvqec/numerics/special.hpp"
#include "tensor.hpp"

namespace cvqec::fock {
namespace {

using detail::Tensor;

Tensor as_tensor(const FockOperator& s) { return Tensor{s.slot_dims(), s.data()}; }

FockOperator from_tensor(std::vector<std::string> labels, std::vector<int> cutoffs, PayloadKind kind,
                         Tensor t, const Diagnostics& diag) {
  FockOperator out(std::move(labels), std::move(cutoffs), kind);
  out.data() = std::move(t.data);
  out.diagnostics() = diag;
  return out;
}

void check_transmission(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidParameter(std::string(what) + " must lie in [0, 1]");
}

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// <k, N-k| U |m, N-m> for the beam-splitter convention documented in the header.
// Only entries with both photon counts inside (da, db) are filled.
std::vector<Eigen::MatrixXd> beamsplitter_blocks(double t, int da, int db) {
  const int max_total = da + db - 2;
  const double st = std::sqrt(t);
  const double sr = std::sqrt(1.0 - t);
  const auto len = static_cast<std::size_t>(max_total) + 1;
  std::vector<double> pow_t(len), pow_r(len), log_fact(len);
  pow_t[0] = pow_r[0] = 1.0;
  for (std::size_t i = 1; i < len; ++i) {
    pow_t[i] = pow_t[i - 1] * st;
    pow_r[i] = pow_r[i - 1] * sr;
  }
  for (std::size_t i = 0; i < len; ++i) log_fact[i] = std::lgamma(static_cast<double>(i) + 1.0);
  std::vector<std::vector<double>> pascal(len);
  for (std::size_t n = 0; n < len; ++n) {
    pascal[n].assign(n + 1, 1.0);
    for (std::size_t k = 1; k < n; ++k) pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
  }

  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(len);
  for (int total = 0; total <= max_total; ++total) {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(total + 1, total + 1);
    const int lo = std::max(0, total - (db - 1));
    const int hi = std::min(total, da - 1);
    for (int m = lo; m <= hi; ++m) {
      const int n = total - m;
      for (int k = lo; k <= hi; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const double norm = std::exp(0.5 * (log_fact[uk] + log_fact[static_cast<std::size_t>(total - k)] -
                                             log_fact[static_cast<std::size_t>(m)] - log_fact[static_cast<std::size_t>(n)]));
        double acc = 0.0;
        for (int p = std::max(0, k - n); p <= std::min(m, k); ++p) {
          const int q = k - p;
          const double sign = (q % 2 == 0) ? 1.0 : -1.0;
          acc += sign * pascal[static_cast<std::size_t>(m)][static_cast<std::size_t>(p)] *
                 pascal[static_cast<std::size_t>(n)][static_cast<std::size_t>(q)] *
                 pow_t[static_cast<std::size_t>(p + n - q)] * pow_r[static_cast<std::size_t>(m - p + q)];
        }
        u(k, m) = acc * norm;
      }
    }
    blocks.push_back(std::move(u));
  }
  return blocks;
}

// Applies a single-mode matrix on the ket side (and its conjugate on the bra side).
FockOperator apply_mode_matrix(const FockOperator& state, std::size_t mode, const Eigen::MatrixXcd& m) {
  Tensor t = detail::apply_slot_matrix(as_tensor(state), mode, m);
  if (!state.is_pure()) t = detail::apply_slot_matrix(t, state.mode_count() + mode, m.conjugate());
  auto cutoffs = state.cutoffs();
  cutoffs[mode] = static_cast<int>(m.rows()) - 1;
  return from_tensor(state.labels(), std::move(cutoffs), state.kind(), std::move(t), state.diagnostics());
}

// Marginal photon-number distribution of one mode (un-normalized).
std::vector<double> level_weights(const FockOperator& state, std::size_t mode) {
  const auto dims = state.slot_dims();
  const auto strides = detail::strides_of(dims);
  const std::size_t n_modes = state.mode_count();
  const auto d = static_cast<std::size_t>(state.cutoffs()[mode]) + 1;
  std::vector<double> w(d, 0.0);
  if (state.is_pure()) {
    const auto rest = detail::complement(n_modes, {mode});
    const auto bases = detail::enumerate_offsets(dims, strides, rest);
    for (std::size_t base : bases) {
      for (std::size_t i = 0; i < d; ++i) w[i] += std::norm(state.data()[base + i * strides[mode]]);
    }
  } else {
    const std::size_t n = state.basis_size();
    std::vector<std::size_t> ket_dims(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(n_modes));
    const auto ket_strides = detail::strides_of(ket_dims);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const std::size_t level = (idx / ket_strides[mode]) % d;
      w[level] += state.data()[idx * n + idx].real();
    }
  }
  return w;
}

}  // namespace

int default_cutoff(double q, double tolerance) {
  if (!(q >= 0.0 && q < 1.0)) throw InvalidParameter("geometric ratio must lie in [0, 1)");
  if (q == 0.0) return 8;
  const int n = static_cast<int>(std::ceil(std::log(tolerance) / std::log(q))) + 5;
  return std::max(8, n);
}

int coherent_cutoff(std::complex<double> alpha, double tolerance) {
  // Poisson tail past n is bounded by term_{n+1} / (1 - x / (n + 2)) once n + 2 > x.
  const double x = std::norm(alpha);
  double term = std::exp(-x);
  int n = 0;
  while (n < 400) {
    const double next = term * x / (n + 1.0);
    if (n + 2.0 > 2.0 * x && 2.0 * next < tolerance) break;
    term = next;
    ++n;
  }
  return std::max(4, n + 2);
}

FockOperator make_tmsv(double chi, int cutoff, const std::string& mode_a, const std::string& mode_b,
                       double tail_tolerance) {
  if (!(chi >= 0.0 && chi < 1.0)) throw InvalidParameter("chi must lie in [0, 1)");
  if (cutoff < 1) throw InvalidParameter("TMSV cutoff must be at least 1");
  FockOperator state({mode_a, mode_b}, {cutoff, cutoff}, PayloadKind::pure_vector);
  const double norm = std::sqrt(1.0 - chi * chi);
  double c = 1.0;
  for (int n = 0; n <= cutoff; ++n) {
    state.amplitude({n, n}) = norm * c;
    c *= chi;
  }
  const double tail = std::pow(chi, 2.0 * (cutoff + 1));
  if (tail > tail_tolerance) {
    state.diagnostics().warn("cutoff-too-small: TMSV tail " + format_double("%.3g", tail) + " exceeds tolerance");
    state.diagnostics().record_truncation(tail, "make_tmsv");
  }
  return state;
}

FockOperator make_coherent(const std::string& mode, std::complex<double> alpha, int cutoff) {
  if (cutoff < 0) throw InvalidParameter("cutoff must be non-negative");
  FockOperator state({mode}, {cutoff}, PayloadKind::pure_vector);
  std::complex<double> c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n <= cutoff; ++n) {
    state.amplitude({n}) = c;
    c *= alpha / std::sqrt(n + 1.0);
  }
  state.diagnostics().record_truncation(1.0 - state.weight(), "make_coherent");
  return state;
}

FockOperator make_fock(const std::string& mode, int n, int cutoff) {
  if (n < 0 || n > cutoff) throw InvalidParameter("Fock level must lie within the cutoff");
  FockOperator state({mode}, {cutoff}, PayloadKind::pure_vector);
  state.amplitude({n}) = 1.0;
  return state;
}

FockOperator to_density(const FockOperator& state) {
  if (!state.is_pure()) return state;
  FockOperator rho(state.labels(), state.cutoffs(), PayloadKind::density_operator);
  const std::size_t n = state.basis_size();
  const auto& psi = state.data();
  auto& out = rho.data();
  for (std::size_t i = 0; i < n; ++i) {
    if (psi[i] == Complex{}) continue;
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = psi[i] * std::conj(psi[j]);
  }
  rho.diagnostics() = state.diagnostics();
  return rho;
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
  std::vector<std::string> labels = a.labels();
  std::vector<int> cutoffs = a.cutoffs();
  for (std::size_t i = 0; i < b.mode_count(); ++i) {
    if (a.has_mode(b.labels()[i])) throw InvalidParameter("tensor factors share mode '" + b.labels()[i] + "'");
    labels.push_back(b.labels()[i]);
    cutoffs.push_back(b.cutoffs()[i]);
  }
  Diagnostics diag = a.diagnostics();
  diag.merge(b.diagnostics());

  const std::size_t na = a.basis_size();
  const std::size_t nb = b.basis_size();
  if (a.is_pure() && b.is_pure()) {
    FockOperator out(std::move(labels), std::move(cutoffs), PayloadKind::pure_vector);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) out.data()[i * nb + j] = a.data()[i] * b.data()[j];
    }
    out.diagnostics() = diag;
    return out;
  }
  const FockOperator ra = to_density(a);
  const FockOperator rb = to_density(b);
  FockOperator out(std::move(labels), std::move(cutoffs), PayloadKind::density_operator);
  const std::size_t n = na * nb;
  for (std::size_t ia = 0; ia < na; ++ia) {
    for (std::size_t ja = 0; ja < na; ++ja) {
      const Complex va = ra.data()[ia * na + ja];
      if (va == Complex{}) continue;
      for (std::size_t ib = 0; ib < nb; ++ib) {
        for (std::size_t jb = 0; jb < nb; ++jb) {
          out.data()[(ia * nb + ib) * n + ja * nb + jb] = va * rb.data()[ib * nb + jb];
        }
      }
    }
  }
  out.diagnostics() = diag;
  return out;
}

FockOperator partial_trace(const FockOperator& state, const std::vector<std::string>& traced) {
  std::vector<std::size_t> traced_idx;
  for (const auto& label : traced) traced_idx.push_back(state.mode_index(label));
  std::sort(traced_idx.begin(), traced_idx.end());
  if (std::adjacent_find(traced_idx.begin(), traced_idx.end()) != traced_idx.end()) {
    throw InvalidParameter("mode traced twice");
  }
  const auto kept = detail::complement(state.mode_count(), traced_idx);
  std::vector<std::string> labels;
  std::vector<int> cutoffs;
  for (std::size_t k : kept) {
    labels.push_back(state.labels()[k]);
    cutoffs.push_back(state.cutoffs()[k]);
  }

  if (state.is_pure()) {
    // rho_K = M M^+ with M the amplitudes reshaped to (kept x traced).
    const auto dims = state.slot_dims();
    const auto strides = detail::strides_of(dims);
    const auto ok = detail::enumerate_offsets(dims, strides, kept);
    const auto ot = detail::enumerate_offsets(dims, strides, traced_idx);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(ot.size()));
    for (std::size_t i = 0; i < ok.size(); ++i) {
      for (std::size_t j = 0; j < ot.size(); ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = state.data()[ok[i] + ot[j]];
      }
    }
    const Eigen::MatrixXcd rho = m * m.adjoint();
    FockOperator out(std::move(labels), std::move(cutoffs), PayloadKind::density_operator);
    const auto n = static_cast<Eigen::Index>(ok.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) out.data()[static_cast<std::size_t>(i * n + j)] = rho(i, j);
    }
    out.diagnostics() = state.diagnostics();
    return out;
  }

  Tensor t = as_tensor(state);
  std::size_t modes = state.mode_count();
  for (auto it = traced_idx.rbegin(); it != traced_idx.rend(); ++it) {
    t = detail::trace_pair(t, *it, modes + *it);
    --modes;
  }
  return from_tensor(std::move(labels), std::move(cutoffs), PayloadKind::density_operator, std::move(t),
                     state.diagnostics());
}

FockOperator apply_beamsplitter(const FockOperator& state, const std::string& mode_a, const std::string& mode_b,
                                double transmissivity) {
  check_transmission(transmissivity, "beam-splitter transmissivity");
  const std::size_t ia = state.mode_index(mode_a);
  const std::size_t ib = state.mode_index(mode_b);
  if (ia == ib) throw InvalidParameter("beam splitter needs two distinct modes");
  const auto blocks = beamsplitter_blocks(transmissivity, state.cutoffs()[ia] + 1, state.cutoffs()[ib] + 1);

  Tensor t = detail::apply_pair_conserving(as_tensor(state), ia, ib, blocks, false);
  if (!state.is_pure()) {
    const std::size_t n = state.mode_count();
    t = detail::apply_pair_conserving(t, n + ia, n + ib, blocks, true);
  }
  FockOperator out = from_tensor(state.labels(), state.cutoffs(), state.kind(), std::move(t), state.diagnostics());
  const double lost = state.weight() - out.weight();
  if (lost > 1e-14) out.diagnostics().record_truncation(lost, "apply_beamsplitter");
  return out;
}

FockOperator apply_loss(const FockOperator& state, const std::string& mode, double transmission) {
  check_transmission(transmission, "loss transmission");
  const std::size_t im = state.mode_index(mode);
  const FockOperator rho = to_density(state);
  if (transmission == 1.0) return rho;

  // Kraus operators K_l |n> = sqrt(C(n,l) t^{n-l} (1-t)^l) |n-l>, applied to ket and bra together.
  const int d = rho.cutoffs()[im] + 1;
  const auto dims = rho.slot_dims();
  const auto strides = detail::strides_of(dims);
  const std::size_t ket = im;
  const std::size_t bra = rho.mode_count() + im;
  const auto bases = detail::enumerate_offsets(dims, strides, detail::complement(dims.size(), {ket, bra}));
  std::vector<double> amp(static_cast<std::size_t>(d * d), 0.0);  // amp[n * d + l]
  for (int n = 0; n < d; ++n) {
    for (int l = 0; l <= n; ++l) {
      amp[static_cast<std::size_t>(n * d + l)] =
          std::sqrt(numerics::binomial(n, l) * std::pow(transmission, n - l) * std::pow(1.0 - transmission, l));
    }
  }
  FockOperator out(rho.labels(), rho.cutoffs(), PayloadKind::density_operator);
  const auto& src = rho.data();
  auto& dst = out.data();
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      const std::size_t from = static_cast<std::size_t>(n) * strides[ket] + static_cast<std::size_t>(m) * strides[bra];
      for (int l = 0; l <= std::min(n, m); ++l) {
        const double k = amp[static_cast<std::size_t>(n * d + l)] * amp[static_cast<std::size_t>(m * d + l)];
        const std::size_t to = static_cast<std::size_t>(n - l) * strides[ket] + static_cast<std::size_t>(m - l) * strides[bra];
        for (std::size_t base : bases) dst[to + base] += k * src[from + base];
      }
    }
  }
  out.diagnostics() = rho.diagnostics();
  return out;
}

FockOperator apply_gain_operator(const FockOperator& state, const std::string& mode, double g, double tail_tolerance) {
  if (!(g >= 1.0) || !std::isfinite(g)) throw InvalidParameter("gain must be finite and at least 1");
  const std::size_t im = state.mode_index(mode);
  const int d = state.cutoffs()[im] + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = std::pow(g, n);
  FockOperator out = apply_mode_matrix(state, im, m);
  const auto levels = level_weights(out, im);
  const double total = out.weight();
  if (total > 0.0 && levels.back() / total > tail_tolerance) {
    out.diagnostics().warn("cutoff-too-small: amplified tail on mode " + mode + " is " +
                           format_double("%.3g", levels.back() / total));
  }
  return out;
}

FockOperator apply_displacement(const FockOperator& state, const std::string& mode, std::complex<double> gamma,
                                int out_cutoff) {
  const std::size_t im = state.mode_index(mode);
  if (out_cutoff < 0) throw InvalidParameter("cutoff must be non-negative");
  const Eigen::MatrixXcd d = numerics::displacement_matrix(gamma, out_cutoff, state.cutoffs()[im]);
  FockOperator out = apply_mode_matrix(state, im, d);
  const double lost = state.weight() - out.weight();
  if (lost > 1e-14) out.diagnostics().record_truncation(lost, "apply_displacement");
  return out;
}

FockOperator apply_phase(const FockOperator& state, const std::string& mode, double phi) {
  const std::size_t im = state.mode_index(mode);
  const int d = state.cutoffs()[im] + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = std::polar(1.0, phi * n);
  return apply_mode_matrix(state, im, m);
}

FockOperator resize_cutoff(const FockOperator& state, const std::string& mode, int cutoff) {
  if (cutoff < 0) throw InvalidParameter("cutoff must be non-negative");
  const std::size_t im = state.mode_index(mode);
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(cutoff + 1, state.cutoffs()[im] + 1);
  FockOperator out = apply_mode_matrix(state, im, m);
  const double lost = state.weight() - out.weight();
  if (lost > 1e-14) out.diagnostics().record_truncation(lost, "resize_cutoff");
  return out;
}

HeraldOutcome herald_pattern(const FockOperator& state, const std::map<std::string, int>& pattern) {
  std::vector<std::string> labels = state.labels();
  std::vector<int> cutoffs = state.cutoffs();
  Tensor t = as_tensor(state);
  for (const auto& [label, count] : pattern) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InvalidParameter("herald pattern names unknown mode '" + label + "'");
    const auto i = static_cast<std::size_t>(it - labels.begin());
    if (count < 0 || count > cutoffs[i]) throw InvalidParameter("herald count beyond cutoff of mode '" + label + "'");
    std::vector<Complex> e(static_cast<std::size_t>(cutoffs[i]) + 1, Complex{});
    e[static_cast<std::size_t>(count)] = 1.0;
    if (!state.is_pure()) t = detail::contract_slot(t, labels.size() + i, e);
    t = detail::contract_slot(t, i, e);
    labels.erase(it);
    cutoffs.erase(cutoffs.begin() + static_cast<std::ptrdiff_t>(i));
  }
  FockOperator out = from_tensor(std::move(labels), std::move(cutoffs), state.kind(), std::move(t), state.diagnostics());
  const double w = out.weight();
  return {std::move(out), w};
}

FockOperator project_dual_homodyne(const FockOperator& state, const std::string& mode_a, const std::string& mode_r,
                                   std::complex<double> beta) {
  const std::size_t ia = state.mode_index(mode_a);
  const std::size_t ir = state.mode_index(mode_r);
  if (ia == ir) throw InvalidParameter("dual homodyne needs two distinct modes");
  // w(k, m) = <m|D(-beta)|k> / sqrt(pi): input level k on a, level m on r.
  const Eigen::MatrixXcd d = numerics::displacement_matrix(-beta, state.cutoffs()[ir], state.cutoffs()[ia]);
  Eigen::MatrixXcd w = d.transpose() / std::sqrt(std::numbers::pi);
  if (ia > ir) w.transposeInPlace();  // contract_pair expects (lower slot, higher slot)
  const std::size_t lo = std::min(ia, ir);
  const std::size_t hi = std::max(ia, ir);

  Tensor t = as_tensor(state);
  const std::size_t n = state.mode_count();
  if (!state.is_pure()) t = detail::contract_pair(t, n + lo, n + hi, w.conjugate());
  t = detail::contract_pair(t, lo, hi, w);

  std::vector<std::string> labels;
  std::vector<int> cutoffs;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == ia || i == ir) continue;
    labels.push_back(state.labels()[i]);
    cutoffs.push_back(state.cutoffs()[i]);
  }
  return from_tensor(std::move(labels), std::move(cutoffs), state.kind(), std::move(t), state.diagnostics());
}

QuadratureMoments quadrature_moments(const FockOperator& rho, const std::string& mode) {
  std::vector<std::string> others;
  for (const auto& label : rho.labels()) {
    if (label != mode) others.push_back(label);
  }
  (void)rho.mode_index(mode);
  const FockOperator single = others.empty() ? to_density(rho) : partial_trace(rho, others);
  const int d = single.cutoffs()[0] + 1;
  const auto& r = single.data();
  auto at = [&](int i, int j) { return r[static_cast<std::size_t>(i * d + j)]; };

  Complex a{}, a2{};
  double n_mean = 0.0, tr = 0.0;
  for (int n = 0; n < d; ++n) {
    tr += at(n, n).real();
    n_mean += n * at(n, n).real();
    if (n >= 1) a += std::sqrt(static_cast<double>(n)) * at(n, n - 1);
    if (n >= 2) a2 += std::sqrt(static_cast<double>(n) * (n - 1)) * at(n, n - 2);
  }
  // Tr(rho a) = sum_n sqrt(n) <n|rho|n-1>
  QuadratureMoments m;
  m.weight = tr;
  m.mean_x = 2.0 * a.real();
  m.mean_p = 2.0 * a.imag();
  m.mean_x2 = 2.0 * a2.real() + 2.0 * n_mean + tr;
  m.mean_p2 = -2.0 * a2.real() + 2.0 * n_mean + tr;
  m.mean_xp = 2.0 * a2.imag();
  return m;
}

void check_physical(const FockOperator& rho, double hermitian_tol, double psd_tol) {
  if (rho.is_pure()) {
    if (rho.weight() > 1.0 + 1e-12) throw ValidationFailure("pure state norm exceeds 1");
    return;
  }
  const auto n = static_cast<Eigen::Index>(rho.basis_size());
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(rho.data().data(), n, n);
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermitian_tol) throw ValidationFailure("density operator is not Hermitian (" + format_double("%.3g", herm) + ")");
  const double tr = m.trace().real();
  if (tr > 1.0 + 1e-12) throw ValidationFailure("density trace exceeds 1");
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < psd_tol) throw ValidationFailure("density operator has a negative eigenvalue");
}

}  // namespace cvqec::fock
