#include "cvqec/protocol/moments.hpp"

namespace cvqec::protocol {
namespace {

double eval(const std::array<double, 3>& c, double lambda) { return c[0] + lambda * (c[1] + lambda * c[2]); }

}  // namespace

Moments MomentPolynomial::at(double lambda) const {
  Moments m;
  m.herald_probability = weight;
  if (!(weight > 0.0)) return m;
  m.mean_x = eval(x, lambda) / weight;
  m.mean_p = eval(p, lambda) / weight;
  m.mean_x2 = eval(x2, lambda) / weight;
  m.mean_p2 = eval(p2, lambda) / weight;
  m.mean_xp = eval(xp, lambda) / weight;
  m.variance_x = m.mean_x2 - m.mean_x * m.mean_x;
  m.variance_p = m.mean_p2 - m.mean_p * m.mean_p;
  return m;
}

void accumulate_displaced(MomentPolynomial& poly, double w, std::complex<double> beta, double trace,
                          std::complex<double> a1, std::complex<double> a2, double n) {
  // D^+ a D = a + gamma with gamma = lambda beta; collect powers of lambda.
  const std::complex<double> b_t = beta * trace;
  const std::complex<double> b2_t = beta * beta * trace;
  const double abs2_t = std::norm(beta) * trace;
  const std::complex<double> b_a1 = beta * a1;
  const double cross = 2.0 * (std::conj(beta) * a1).real();  // gamma^* <a> + gamma <a^+>, per lambda

  poly.weight += w * trace;
  poly.x[0] += w * 2.0 * a1.real();
  poly.x[1] += w * 2.0 * b_t.real();
  poly.p[0] += w * 2.0 * a1.imag();
  poly.p[1] += w * 2.0 * b_t.imag();

  const double base = 2.0 * n + trace;
  poly.x2[0] += w * (2.0 * a2.real() + base);
  poly.x2[1] += w * (4.0 * b_a1.real() + 2.0 * cross);
  poly.x2[2] += w * (2.0 * b2_t.real() + 2.0 * abs2_t);
  poly.p2[0] += w * (-2.0 * a2.real() + base);
  poly.p2[1] += w * (-4.0 * b_a1.real() + 2.0 * cross);
  poly.p2[2] += w * (-2.0 * b2_t.real() + 2.0 * abs2_t);
  poly.xp[0] += w * 2.0 * a2.imag();
  poly.xp[1] += w * 4.0 * b_a1.imag();
  poly.xp[2] += w * 2.0 * b2_t.imag();
}

}  // namespace cvqec::protocol
