#include <cmath>

#include <doctest.h>

#include "cvqec/errors.hpp"
#include "cvqec/optimize/gain.hpp"
#include "cvqec/protocol/analytic.hpp"

using namespace cvqec;
using namespace cvqec::optimize;
using doctest::Approx;

namespace {

protocol::ProtocolParams params(double g2, double tau, double epsilon, double delta) {
  protocol::ProtocolParams p;
  p.g = std::sqrt(g2);
  p.tau = tau;
  p.epsilon = epsilon;
  p.delta = delta;
  return p;
}

}  // namespace

TEST_CASE("optimizer mechanics on known objectives") {
  SUBCASE("interior peak") {
    const auto r = maximize_gain([](double l) { return GainSample{-(l - 1.7) * (l - 1.7), l}; }, 1.0);
    CHECK(r.lambda_opt == Approx(1.7).epsilon(2e-4));
    CHECK(r.eta_eff_at_opt == Approx(r.lambda_opt));
    CHECK(r.geof_opt >= r.geof_at_nominal);
    CHECK(r.widenings == 0);
    CHECK_FALSE(r.at_upper_edge);
  }
  SUBCASE("peak beyond the bracket triggers widening") {
    const auto r = maximize_gain([](double l) { return GainSample{-(l - 5.2) * (l - 5.2), 0.0}; }, 1.0);
    CHECK(r.widenings >= 1);
    CHECK_FALSE(r.at_upper_edge);
    CHECK(r.lambda_opt == Approx(5.2).epsilon(2e-4));
  }
  SUBCASE("decreasing objective keeps the nominal gain") {
    const auto r = maximize_gain([](double l) { return GainSample{-l, 0.0}; }, 1.0);
    CHECK(r.lambda_opt == 1.0);
    CHECK(r.geof_opt == r.geof_at_nominal);
  }
  SUBCASE("failed gains are excluded") {
    const auto r = maximize_gain(
        [](double l) {
          if (l > 1.2 && l < 1.4) throw NonlinearChannel("synthetic failure");
          return GainSample{-(l - 2.0) * (l - 2.0), 0.0};
        },
        1.0);
    CHECK(r.excluded > 0);
    CHECK_FALSE(r.diagnostics.empty());
    CHECK(r.lambda_opt == Approx(2.0).epsilon(2e-4));
  }
  SUBCASE("every gain failing is an error") {
    CHECK_THROWS_AS(maximize_gain([](double) -> GainSample { throw InvalidChannel("no"); }, 1.0), NumericalFailure);
  }
  CHECK_THROWS_AS(maximize_gain([](double) { return GainSample{}; }, 0.0), InvalidParameter);
}

TEST_CASE("teleporter gain optimum") {
  SUBCASE("ideal amplifier: the nominal gain is optimal") {
    protocol::ProtocolParams p = params(2.0, 1.0, 1.0, 1.0);
    const channel::ChannelProbe probe(channel::fock_source(p, fock::Amplifier::ideal_gain));
    const auto r = optimize_lambda(probe, p.zeta, p.nominal_lambda());
    const double grid_step = 2.0 * p.nominal_lambda() / 16.0;
    CHECK(std::abs(r.lambda_opt - p.nominal_lambda()) <= grid_step);
    CHECK(r.geof_opt == Approx(r.geof_at_nominal).epsilon(1e-6));
  }
  SUBCASE("realistic components: strict improvement") {
    for (double g2 : {5.0, 9.0, 20.0}) {
      const auto r = optimize_lambda(params(g2, 0.98, 0.7, 0.9));
      CHECK(r.geof_opt > r.geof_at_nominal + 1e-4);
      CHECK(r.lambda_opt > 0.0);
      CHECK_FALSE(r.at_upper_edge);
    }
  }
  SUBCASE("unit gain, perfect components: interior optimum") {
    const auto p = params(1.0, 1.0, 1.0, 1.0);
    const auto r = optimize_lambda(p);
    CHECK(r.lambda_opt > p.nominal_lambda());
    CHECK(r.lambda_opt < 3.0 * p.nominal_lambda());
    CHECK(r.widenings == 0);
  }
  SUBCASE("never below the nominal gain") {
    for (double g2 : {1.5, 4.0, 30.0, 60.0}) {
      const auto r = optimize_lambda(params(g2, 0.95, 0.5, 0.8));
      CHECK(r.geof_opt >= r.geof_at_nominal - 1e-9);
    }
  }
}
