#include "cvqec/optimize/gain.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "cvqec/errors.hpp"
#include "cvqec/numerics/optimize.hpp"

namespace cvqec::optimize {
namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

// Wraps the objective so failures become -inf and the best point is tracked.
class Tracker {
 public:
  Tracker(const GainObjective& f, GainOptimum& out) : f_(f), out_(out) {}

  double operator()(double lambda) {
    ++out_.evaluations;
    GainSample s;
    try {
      s = f_(lambda);
      if (!std::isfinite(s.geof) || !std::isfinite(s.eta_eff)) throw NumericalFailure("non-finite objective");
    } catch (const Error& e) {
      ++out_.excluded;
      char buf[64];
      std::snprintf(buf, sizeof buf, "lambda=%.6g excluded: ", lambda);
      out_.diagnostics.push_back(buf + std::string(e.what()));
      return kFailed;
    }
    if (!found_ || s.geof > out_.geof_opt) {
      found_ = true;
      out_.lambda_opt = lambda;
      out_.geof_opt = s.geof;
      out_.eta_eff_at_opt = s.eta_eff;
    }
    return s.geof;
  }

  bool found() const noexcept { return found_; }

 private:
  const GainObjective& f_;
  GainOptimum& out_;
  bool found_ = false;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return x;
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

GainObjective geof_objective(const channel::ChannelProbe& probe, double zeta, const entanglement::GeofOptions& geof) {
  return [&probe, zeta, geof](double lambda) {
    const channel::EffectiveChannel ch = probe.at(lambda);
    return GainSample{entanglement::geof_from_cov(channel::corrected_covariance(zeta, ch), geof).value, ch.eta_eff};
  };
}

GainOptimum maximize_gain(const GainObjective& objective, double lambda0, const GainOptions& options) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw InvalidParameter("nominal gain must be positive");
  if (options.grid_points < 3) throw InvalidParameter("gain grid needs at least 3 points");
  if (!(options.upper_factor > 1.0)) throw InvalidParameter("gain bracket factor must exceed 1");
  if (!(options.rel_tolerance > 0.0)) throw InvalidParameter("gain tolerance must be positive");

  GainOptimum out;
  Tracker track(objective, out);

  out.geof_at_nominal = track(lambda0);
  if (out.geof_at_nominal == kFailed) out.geof_at_nominal = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> grid = linspace(lambda0, options.upper_factor * lambda0, options.grid_points);
  std::vector<double> values(grid.size());
  values[0] = std::isnan(out.geof_at_nominal) ? kFailed : out.geof_at_nominal;
  for (std::size_t i = 1; i < grid.size(); ++i) values[i] = track(grid[i]);

  std::size_t best = argmax(values);
  double span = grid.back() - grid.front();
  while (best + 1 == grid.size() && values[best] != kFailed && out.widenings < options.max_widenings) {
    ++out.widenings;
    span *= 2.0;
    const double lo = grid[grid.size() - 2];
    const double lo_value = values[grid.size() - 2];
    grid = linspace(lo, lo + span, options.grid_points);
    values.assign(grid.size(), kFailed);
    values[0] = lo_value;
    for (std::size_t i = 1; i < grid.size(); ++i) values[i] = track(grid[i]);
    best = argmax(values);
  }
  if (!track.found()) throw NumericalFailure("gain optimizer: every grid point failed");
  out.at_upper_edge = best + 1 == grid.size();
  if (out.at_upper_edge) out.diagnostics.push_back("optimum remains on the upper bracket edge");

  // Refinement needs an interior point that beats both ends.
  double lo, mid, hi;
  if (best == 0) {
    lo = grid[0];
    hi = grid[1];
    mid = hi;
    bool ok = false;
    for (int k = 0; k < 4 && !ok; ++k) {
      mid = 0.5 * (lo + mid);
      ok = track(mid) > values[0];
    }
    if (!ok) return out;
  } else if (out.at_upper_edge) {
    return out;
  } else {
    lo = grid[best - 1];
    mid = grid[best];
    hi = grid[best + 1];
  }

  auto negated = [&track](double l) {
    const double v = track(l);
    return v == kFailed ? std::numeric_limits<double>::max() : -v;
  };
  try {
    numerics::golden_section(negated, lo, mid, hi, options.rel_tolerance);
  } catch (const NumericalFailure&) {
    // Flat neighbourhood: the grid point already is the answer.
  }
  return out;
}

GainOptimum optimize_lambda(const channel::ChannelProbe& probe, double zeta, double lambda0, const GainOptions& options) {
  return maximize_gain(geof_objective(probe, zeta, options.geof), lambda0, options);
}

GainOptimum optimize_lambda(const protocol::ProtocolParams& params, const GainOptions& options,
                            const channel::CharacterizationOptions& characterization) {
  const channel::ChannelProbe probe(channel::analytic_source(params), characterization);
  return optimize_lambda(probe, params.zeta, params.nominal_lambda(), options);
}

}  // namespace cvqec::optimize
