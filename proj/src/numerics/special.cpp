#include "cvqec/numerics/special.hpp"

#include <cmath>

namespace cvqec::numerics {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double value = 1.0;
  for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

double sqrt_factorial_ratio(int a, int b) {
  return std::exp(0.5 * (std::lgamma(a + 1.0) - std::lgamma(b + 1.0)));
}

std::vector<double> laguerre_table(int n_max, int alpha, double x) {
  std::vector<double> l(static_cast<std::size_t>(n_max) + 1);
  l[0] = 1.0;
  if (n_max >= 1) l[1] = 1.0 + alpha - x;
  for (int n = 1; n < n_max; ++n) {
    l[n + 1] = ((2.0 * n + 1.0 + alpha - x) * l[n] - (n + alpha) * l[n - 1]) / (n + 1.0);
  }
  return l;
}

Eigen::MatrixXcd displacement_matrix(std::complex<double> gamma, int out_cutoff, int in_cutoff) {
  using C = std::complex<double>;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(out_cutoff + 1, in_cutoff + 1);
  const double x = std::norm(gamma);
  const double envelope = std::exp(-0.5 * x);
  const int n_max = std::max(out_cutoff, in_cutoff);
  // <m|D|n> = sqrt(n!/m!) gamma^(m-n) e^{-x/2} L_n^{(m-n)}(x)          for m >= n
  //         = sqrt(m!/n!) (-gamma*)^(n-m) e^{-x/2} L_m^{(n-m)}(x)      for m <  n
  for (int shift = 0; shift <= n_max; ++shift) {
    const int lower_max = std::min(out_cutoff - shift, in_cutoff);
    if (lower_max >= 0) {
      const auto lag = laguerre_table(lower_max, shift, x);
      const C power = std::pow(gamma, shift);
      for (int n = 0; n <= lower_max; ++n) {
        const int m = n + shift;
        d(m, n) = sqrt_factorial_ratio(n, m) * power * envelope * lag[n];
      }
    }
    if (shift == 0) continue;
    const int upper_max = std::min(in_cutoff - shift, out_cutoff);
    if (upper_max >= 0) {
      const auto lag = laguerre_table(upper_max, shift, x);
      const C power = std::pow(-std::conj(gamma), shift);
      for (int m = 0; m <= upper_max; ++m) {
        const int n = m + shift;
        d(m, n) = sqrt_factorial_ratio(m, n) * power * envelope * lag[m];
      }
    }
  }
  return d;
}

}  // namespace cvqec::numerics
