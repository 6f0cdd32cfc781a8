#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cvqec::numerics {

double binomial(int n, int k);

// sqrt(a! / b!) evaluated in log space.
double sqrt_factorial_ratio(int a, int b);

// Generalized Laguerre polynomials L_n^{(alpha)}(x) for n = 0..n_max.
std::vector<double> laguerre_table(int n_max, int alpha, double x);

// Matrix elements <m|D(gamma)|n> for m <= out_cutoff, n <= in_cutoff.
Eigen::MatrixXcd displacement_matrix(std::complex<double> gamma, int out_cutoff, int in_cutoff);

}  // namespace cvqec::numerics
