#include "cvqec/protocol/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cvqec/errors.hpp"
#include "cvqec/numerics/gauss_hermite.hpp"
#include "cvqec/numerics/special.hpp"

namespace cvqec::protocol {
namespace {

using numerics::binomial;

std::vector<double> inverse_factorials(int n) {
  std::vector<double> f(static_cast<std::size_t>(n) + 1, 1.0);
  for (int i = 1; i <= n; ++i) f[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i - 1)] / i;
  return f;
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

Eigen::Matrix2cd HeraldedQubitBlock::matrix() const {
  Eigen::Matrix2cd m;
  m << rho00, rho01, rho10, rho11;
  return m;
}

int series_order(double chi) {
  if (!(chi >= 0.0 && chi < 1.0)) throw InvalidParameter("chi must lie in [0, 1)");
  if (chi == 0.0) return 20;
  const int n = static_cast<int>(std::ceil(std::log(1e-12) / std::log(chi * chi))) + 5;
  return std::max(20, n);
}

BlockSeries block_series(const ProtocolParams& params, int s_max) {
  params.validate();
  const int S = s_max > 0 ? s_max : series_order(params.chi);
  const double chi2 = params.chi * params.chi;
  const double nu = params.nu();
  const double tau = params.tau;
  const double xi = params.xi();
  const double eps = params.epsilon;
  const double del = params.delta;

  BlockSeries out;
  const double herald_factor = params.herald == HeraldMode::both ? 1.0 : 0.5;
  out.prefactor = (1.0 - chi2) / std::numbers::pi * herald_factor;
  out.a.assign(static_cast<std::size_t>(S) + 2, 0.0);
  out.b.assign(out.a.size(), 0.0);
  out.c.assign(out.a.size(), 0.0);
  const auto inv_fact = inverse_factorials(S + 2);

  // Photon from the ancilla reaches D1; the amplified arm stays dark.
  const double bright = eps * xi * del;
  // D1 clicks on a channel photon while the ancilla photon is lost or absent.
  const double dark = eps * xi * (1.0 - del) + (1.0 - eps);
  const double coherent = eps * std::sqrt(xi * del * nu * tau * (1.0 - xi)) * params.chi;

  double ws = 1.0;  // (1 - nu)^s chi^{2s}
  for (int s = 0; s <= S; ++s) {
    for (int r = 0; r <= s; ++r) {
      const int k = s - r;
      const double base = ws * std::pow(1.0 - tau, r) * binomial(s, r) * std::pow(tau, k) * inv_fact[static_cast<std::size_t>(k)];
      out.a[static_cast<std::size_t>(k)] += bright * base;
      out.c[static_cast<std::size_t>(k)] += coherent * base * (s + 1.0) / (s + 1.0 - r);
    }
    // The channel photon heralds: s + 1 photons entered the lossy arm.
    for (int r = 0; r <= s + 1; ++r) {
      const int k = s + 1 - r;
      const double term = ws * chi2 * (s + 1.0) * nu * std::pow(1.0 - tau, r) * binomial(s + 1, r) *
                          std::pow(tau, k) * inv_fact[static_cast<std::size_t>(k)];
      out.a[static_cast<std::size_t>(k)] += dark * term;
      out.b[static_cast<std::size_t>(k)] += eps * (1.0 - xi) * term;
    }
    ws *= (1.0 - nu) * chi2;
  }
  return out;
}

HeraldedQubitBlock rho_out(const ProtocolParams& params, std::complex<double> beta, int s_max) {
  const BlockSeries series = block_series(params, s_max);
  const std::complex<double> u = std::sqrt(params.tau) * params.alpha - beta;
  const double x = std::norm(u);
  const double env = series.prefactor * std::exp(-x);

  HeraldedQubitBlock block;
  block.beta = beta;
  block.displacement = params.lambda * beta;
  block.rho00 = env * horner(series.a, x);
  block.rho11 = env * horner(series.b, x);
  block.rho10 = env * u * horner(series.c, x);
  block.rho01 = std::conj(block.rho10);
  block.weight = block.rho00.real() + block.rho11.real();
  return block;
}

MomentPolynomial moment_polynomial(const ProtocolParams& params, int s_max) {
  const BlockSeries series = block_series(params, s_max);
  const std::complex<double> v = std::sqrt(params.tau) * params.alpha;
  // Gaussian moments: \int e^{-|u|^2} |u|^{2k} d^2u = pi k!.
  double sum_a = 0.0, sum_b = 0.0, sum_ab1 = 0.0, sum_c1 = 0.0;
  double fact = 1.0;
  for (std::size_t k = 0; k < series.a.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    const double ak = series.a[k] * fact;
    const double bk = series.b[k] * fact;
    const double ck = series.c[k] * fact;
    sum_a += ak;
    sum_b += bk;
    sum_ab1 += (ak + bk) * static_cast<double>(k + 1);
    sum_c1 += ck * static_cast<double>(k + 1);
  }
  const double pp = series.prefactor * std::numbers::pi;
  const double w = pp * (sum_a + sum_b);
  const double vr = v.real();
  const double vi = v.imag();

  MomentPolynomial poly;
  poly.weight = w;
  poly.x = {0.0, 2.0 * vr * w, 0.0};
  poly.p = {0.0, 2.0 * vi * w, 0.0};
  const double c0 = pp * (sum_a + 3.0 * sum_b);
  const double c1 = -4.0 * pp * sum_c1;
  const double c2 = 2.0 * pp * sum_ab1;
  poly.x2 = {c0, c1, c2 + 4.0 * vr * vr * w};
  poly.p2 = {c0, c1, c2 + 4.0 * vi * vi * w};
  poly.xp = {0.0, 0.0, 4.0 * vr * vi * w};
  return poly;
}

double envelope_kappa(const ProtocolParams& params, double gain_sq) {
  const double q = params.chi * params.chi * (1.0 - params.nu() + gain_sq * params.nu());
  if (!(q < 1.0)) throw InvalidParameter("amplified EPR tail does not converge (chi^2 (1 - nu + g^2 nu) >= 1)");
  return 1.0 - params.tau * q / (1.0 - (1.0 - params.tau) * q);
}

MomentPolynomial moment_polynomial_quadrature(const ProtocolParams& params, int order, int s_max) {
  const BlockSeries series = block_series(params, s_max);
  const std::complex<double> v = std::sqrt(params.tau) * params.alpha;
  MomentPolynomial poly;
  for (const auto& pt : numerics::planar_rule(order, envelope_kappa(params))) {
    const std::complex<double> u = pt.u;
    const double x = std::norm(u);
    const double env = series.prefactor * std::exp(-x);
    const double r00 = env * horner(series.a, x);
    const double r11 = env * horner(series.b, x);
    const std::complex<double> r10 = env * u * horner(series.c, x);
    accumulate_displaced(poly, pt.weight, v - u, r00 + r11, r10, {}, r11);
  }
  return poly;
}

Moments moments_beta_averaged(const ProtocolParams& params, int s_max) {
  return moment_polynomial(params, s_max).at(params.lambda);
}

double success_probability(const ProtocolParams& params) {
  ProtocolParams p = params;
  p.alpha = {};
  p.lambda = 0.0;
  p.tau = 1.0;
  return moment_polynomial(p).weight;
}

}  // namespace cvqec::protocol
