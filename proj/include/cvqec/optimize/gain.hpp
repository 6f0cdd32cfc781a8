#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cvqec/channel/characterization.hpp"
#include "cvqec/entanglement/geof.hpp"
#include "cvqec/protocol/params.hpp"

namespace cvqec::optimize {

struct GainSample {
  double geof = 0.0;
  double eta_eff = 0.0;
};

// Corrected-channel figure of merit at one teleporter gain. May throw; failed
// gains are dropped by the optimizer rather than aborting the search.
using GainObjective = std::function<GainSample(double lambda)>;

struct GainOptimum {
  double lambda_opt = 0.0;
  double geof_opt = 0.0;
  double geof_at_nominal = 0.0;  // NaN if the nominal gain itself failed
  double eta_eff_at_opt = 0.0;
  int evaluations = 0;
  int excluded = 0;
  int widenings = 0;
  bool at_upper_edge = false;  // still on the edge after every widening
  std::vector<std::string> diagnostics;
};

struct GainOptions {
  int grid_points = 17;
  double upper_factor = 3.0;     // initial bracket is [lambda0, upper_factor * lambda0]
  double rel_tolerance = 1e-4;   // golden-section stopping width, relative to lambda
  int max_widenings = 4;
  entanglement::GeofOptions geof = tight_geof();

  static entanglement::GeofOptions tight_geof() {
    entanglement::GeofOptions o;
    o.r_tolerance = 1e-9;
    return o;
  }
};

GainObjective geof_objective(const channel::ChannelProbe& probe, double zeta, const entanglement::GeofOptions& geof);

// Grid search on the bracket, widened while the best point sits on the upper
// edge, then golden-section refinement around the best grid point.
GainOptimum maximize_gain(const GainObjective& objective, double lambda0, const GainOptions& options = {});

GainOptimum optimize_lambda(const channel::ChannelProbe& probe, double zeta, double lambda0,
                            const GainOptions& options = {});

// Uses the analytic engine; params.lambda is ignored.
GainOptimum optimize_lambda(const protocol::ProtocolParams& params, const GainOptions& options = {},
                            const channel::CharacterizationOptions& characterization = {});

}  // namespace cvqec::optimize
