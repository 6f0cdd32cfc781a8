#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "cvqec/fock/fock_operator.hpp"

namespace cvqec::fock {

// Smallest cutoff keeping a geometric tail q^n below `tolerance`, with a safety
// margin of five levels and a floor of 8. For q = chi^2 = 0.25 this gives 25.
int default_cutoff(double q, double tolerance = 1e-12);

// Cutoff for a coherent state |alpha> whose neglected norm is below `tolerance`.
int coherent_cutoff(std::complex<double> alpha, double tolerance = 1e-16);

FockOperator make_tmsv(double chi, int cutoff, const std::string& mode_a = "R",
                       const std::string& mode_b = "B", double tail_tolerance = 1e-12);
FockOperator make_coherent(const std::string& mode, std::complex<double> alpha, int cutoff);
FockOperator make_fock(const std::string& mode, int n, int cutoff);

FockOperator tensor(const FockOperator& a, const FockOperator& b);
FockOperator to_density(const FockOperator& state);
FockOperator partial_trace(const FockOperator& state, const std::vector<std::string>& traced);

// Two-mode unitary a^+ -> sqrt(t) a^+ + sqrt(1-t) b^+, b^+ -> -sqrt(1-t) a^+ + sqrt(t) b^+.
FockOperator apply_beamsplitter(const FockOperator& state, const std::string& mode_a,
                                const std::string& mode_b, double transmissivity);

// Pure-loss channel of intensity transmission t; pure inputs are promoted to densities.
FockOperator apply_loss(const FockOperator& state, const std::string& mode, double transmission);

// Multiplies the |n> amplitude by g^n. Warns when the top level carries more than
// `tail_tolerance` of the amplified weight.
FockOperator apply_gain_operator(const FockOperator& state, const std::string& mode, double g,
                                 double tail_tolerance = 1e-8);

FockOperator apply_displacement(const FockOperator& state, const std::string& mode,
                                std::complex<double> gamma, int out_cutoff);

// exp(i phi n) on one mode.
FockOperator apply_phase(const FockOperator& state, const std::string& mode, double phi);

FockOperator resize_cutoff(const FockOperator& state, const std::string& mode, int cutoff);

struct HeraldOutcome {
  FockOperator state;
  double weight;
};

HeraldOutcome herald_pattern(const FockOperator& state, const std::map<std::string, int>& pattern);

// Contracts modes a and r against (1/sqrt(pi)) sum_n D_a(beta)|n>_a|n>_r.
FockOperator project_dual_homodyne(const FockOperator& state, const std::string& mode_a,
                                   const std::string& mode_r, std::complex<double> beta);

// Un-normalized quadrature moments, X = a + a^+, P = -i(a - a^+).
struct QuadratureMoments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
  double mean_xp = 0.0;  // <(XP + PX)/2>
  double weight = 0.0;
};

QuadratureMoments quadrature_moments(const FockOperator& rho, const std::string& mode);

// Throws ValidationFailure unless the density is Hermitian, PSD and of trace <= 1.
void check_physical(const FockOperator& rho, double hermitian_tol = 1e-12, double psd_tol = -1e-10);

}  // namespace cvqec::fock
