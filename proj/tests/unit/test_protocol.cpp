#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "cvqec/errors.hpp"
#include "cvqec/fock/pipeline.hpp"
#include "cvqec/protocol/analytic.hpp"

using namespace cvqec;
using protocol::ProtocolParams;
using doctest::Approx;

namespace {

ProtocolParams ideal(double g2, double alpha = 0.0) {
  ProtocolParams p;
  p.g = std::sqrt(g2);
  p.alpha = alpha;
  p.lambda = p.nominal_lambda();
  return p;
}

double max_poly_diff(const protocol::MomentPolynomial& a, const protocol::MomentPolynomial& b) {
  double d = std::abs(a.weight - b.weight);
  for (int k = 0; k < 3; ++k) {
    d = std::max({d, std::abs(a.x[k] - b.x[k]), std::abs(a.p[k] - b.p[k]), std::abs(a.x2[k] - b.x2[k]),
                  std::abs(a.p2[k] - b.p2[k]), std::abs(a.xp[k] - b.xp[k])});
  }
  return d;
}

}  // namespace

TEST_CASE("parameter domain") {
  ProtocolParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.xi() == Approx(0.5));
  p.g = 2.0;
  CHECK(p.xi() == Approx(0.2));
  CHECK(ProtocolParams::g_from_xi(0.2) == Approx(2.0));
  CHECK(p.nominal_lambda() == Approx(2.0 * 0.1 * 0.5));
  CHECK(p.nu() == Approx(p.eta * p.delta));
  CHECK_THROWS_AS(ProtocolParams::g_from_xi(0.6), InvalidParameter);
  p.g = 0.5;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = ProtocolParams{};
  p.chi = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = ProtocolParams{};
  p.tau = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
}

TEST_CASE("heralded block") {
  SUBCASE("no entanglement leaves no single-photon component") {
    ProtocolParams p = ideal(4.0, 0.3);
    p.chi = 0.0;
    const auto b = protocol::rho_out(p, {0.1, -0.2});
    CHECK(std::abs(b.rho11) == 0.0);
    CHECK(std::abs(b.rho01) == 0.0);
    CHECK(b.rho00.real() > 0.0);
  }
  SUBCASE("matches the Fock engine") {
    ProtocolParams p;
    p.chi = 0.5;
    p.eta = 0.01;
    p.g = ProtocolParams::g_from_xi(0.2);
    p.alpha = 0.2;
    const std::complex<double> beta(0.1, 0.3);
    const auto a = protocol::rho_out(p, beta);
    fock::PipelineOptions opts;
    opts.cutoff = 25;
    const auto f = fock::ProtocolPipeline(p, fock::Amplifier::quantum_scissor, opts).conditional_output(beta);
    CHECK(std::abs(a.rho00 - f.element({0}, {0})) < 1e-10);
    CHECK(std::abs(a.rho01 - f.element({0}, {1})) < 1e-10);
    CHECK(std::abs(a.rho10 - f.element({1}, {0})) < 1e-10);
    CHECK(std::abs(a.rho11 - f.element({1}, {1})) < 1e-10);
    CHECK(std::abs(a.rho10) > 1e-6);
  }
  SUBCASE("without an ancilla photon the block is diagonal") {
    ProtocolParams p = ideal(9.0, 0.3);
    p.epsilon = 1e-12;
    const auto b = protocol::rho_out(p, {0.2, 0.1});
    CHECK(std::abs(b.rho10) < 1e-6 * std::abs(b.rho00));
  }
  SUBCASE("Hermitian and positive") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (double g2 : {2.0, 9.0, 40.0}) {
      ProtocolParams p = ideal(g2, 0.3);
      p.tau = 0.95;
      p.epsilon = 0.7;
      p.delta = 0.9;
      for (int i = 0; i < 20; ++i) {
        const Eigen::Matrix2cd m = protocol::rho_out(p, {u(rng), u(rng)}).matrix();
        CHECK((m - m.adjoint()).norm() < 1e-15);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
        CHECK(es.eigenvalues().minCoeff() >= -1e-15);
      }
    }
  }
}

TEST_CASE("beta-averaged moments") {
  SUBCASE("zero input has zero mean") {
    ProtocolParams p = ideal(9.0, 0.0);
    p.epsilon = 0.7;
    const auto m = protocol::moments_beta_averaged(p);
    CHECK(std::abs(m.mean_x) < 1e-15);
    CHECK(std::abs(m.mean_p) < 1e-15);
  }
  SUBCASE("never below shot noise, no quadrature mixing for real probes") {
    for (double g2 : {1.0, 9.0, 40.0}) {
      for (double tau : {0.95, 1.0}) {
        ProtocolParams p = ideal(g2, 0.3);
        p.tau = tau;
        p.epsilon = 0.7;
        p.delta = 0.9;
        for (double scale : {0.5, 1.0, 2.0}) {
          const auto m = protocol::moment_polynomial(p).at(scale * p.nominal_lambda());
          CHECK(m.variance_x >= 1.0 - 1e-6);
          CHECK(m.variance_p >= 1.0 - 1e-6);
          CHECK(std::abs(m.mean_p) < 1e-10);
        }
      }
    }
  }
  SUBCASE("closed form against the Fock engine") {
    const ProtocolParams p = ideal(9.0, 0.3);
    const auto a = protocol::moment_polynomial(p);
    const auto f = fock::ProtocolPipeline(p, fock::Amplifier::quantum_scissor).moment_polynomial();
    CHECK(max_poly_diff(a, f) < 1e-8);
    const auto ma = a.at(p.lambda), mf = f.at(p.lambda);
    CHECK(ma.mean_x == Approx(mf.mean_x).epsilon(1e-8));
    CHECK(ma.variance_x == Approx(mf.variance_x).epsilon(1e-8));
  }
  SUBCASE("closed form against quadrature") {
    ProtocolParams p = ideal(5.0);
    p.alpha = {0.3, -0.1};
    p.tau = 0.95;
    p.epsilon = 0.7;
    p.delta = 0.9;
    CHECK(max_poly_diff(protocol::moment_polynomial(p), protocol::moment_polynomial_quadrature(p)) < 1e-12);
  }
  SUBCASE("series doubling is stable") {
    ProtocolParams p = ideal(40.0, 0.3);
    p.epsilon = 0.7;
    const int n = protocol::series_order(p.chi);
    CHECK(max_poly_diff(protocol::moment_polynomial(p, n), protocol::moment_polynomial(p, 2 * n)) < 1e-10);
  }
  SUBCASE("moments are exact quadratics in lambda") {
    ProtocolParams p = ideal(9.0, 0.3);
    const auto poly = protocol::moment_polynomial(p);
    for (double lambda : {0.0, 0.1, 0.37}) {
      p.lambda = lambda;
      const auto direct = protocol::moments_beta_averaged(p);
      const auto m = poly.at(lambda);
      CHECK(direct.mean_x == Approx(m.mean_x).epsilon(1e-13));
      CHECK(direct.mean_x2 == Approx(m.mean_x2).epsilon(1e-13));
      CHECK(direct.mean_p2 == Approx(m.mean_p2).epsilon(1e-13));
    }
  }
}

TEST_CASE("herald probability") {
  SUBCASE("independent of the input amplitude") {
    ProtocolParams p = ideal(9.0, 0.0);
    p.epsilon = 0.7;
    p.delta = 0.9;
    ProtocolParams q = p;
    q.alpha = 0.4;
    CHECK(std::abs(protocol::moment_polynomial(p).weight - protocol::moment_polynomial(q).weight) < 1e-8);
    const auto fp = fock::ProtocolPipeline(p, fock::Amplifier::quantum_scissor).moment_polynomial();
    const auto fq = fock::ProtocolPipeline(q, fock::Amplifier::quantum_scissor).moment_polynomial();
    CHECK(std::abs(fp.weight - fq.weight) < 1e-8);
  }
  SUBCASE("vacuum scissor") {
    for (double g2 : {1.0, 4.0, 9.0}) {
      ProtocolParams p = ideal(g2);
      p.chi = 0.0;
      CHECK(std::abs(protocol::success_probability(p) - p.xi() / 2) < 1e-12);
    }
  }
  SUBCASE("matches the resource herald weight") {
    ProtocolParams p;
    p.chi = 0.5;
    p.eta = 0.01;
    p.g = ProtocolParams::g_from_xi(0.2);
    CHECK(std::abs(protocol::success_probability(p) -
                   fock::resource_herald_weight(p, fock::Amplifier::quantum_scissor)) < 1e-10);
    CHECK(std::abs(protocol::success_probability(p) - protocol::moment_polynomial(p).weight) < 1e-12);
  }
  SUBCASE("decreases with gain and with detector loss") {
    ProtocolParams p = ideal(10.0);
    p.epsilon = 0.7;
    p.delta = 0.9;
    ProtocolParams hi = p;
    hi.g = std::sqrt(40.0);
    CHECK(protocol::success_probability(p) > protocol::success_probability(hi));
    ProtocolParams perfect = p;
    perfect.delta = 1.0;
    CHECK(protocol::success_probability(p) < protocol::success_probability(perfect));
  }
  SUBCASE("accepting both patterns doubles the weight") {
    ProtocolParams p = ideal(9.0, 0.3);
    p.tau = 0.95;
    p.epsilon = 0.7;
    ProtocolParams both = p;
    both.herald = protocol::HeraldMode::both;
    const auto a = protocol::moment_polynomial(p), b = protocol::moment_polynomial(both);
    CHECK(b.weight == Approx(2 * a.weight).epsilon(1e-13));
    CHECK(b.at(p.lambda).variance_x == Approx(a.at(p.lambda).variance_x).epsilon(1e-13));
    const auto fb = fock::ProtocolPipeline(both, fock::Amplifier::quantum_scissor).moment_polynomial();
    CHECK(max_poly_diff(b, fb) < 1e-8);
  }
}
