#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvqec/experiment/config.hpp"
#include "cvqec/optimize/gain.hpp"

namespace cvqec::experiment {

struct SweepRow {
  double g2 = 0.0;
  double xi = 0.0;
  double lambda_used = 0.0;
  double eta_eff = 0.0;
  double added_noise = 0.0;
  double geof_corrected = 0.0;
  double geof_baseline = 0.0;
  double geof_deterministic = 0.0;
  double p_success = 0.0;
  double saturation_residual = 0.0;
  double engine_disagreement = 0.0;  // stays 0 unless the engine is cross-check
};

struct PointReport {
  SweepRow row;
  double lambda_nominal = 0.0;
  std::optional<optimize::GainOptimum> optimum;
  int resource_cutoff = 0;  // Fock cutoff (0 for the analytic engine)
  int series_order = 0;
  std::vector<std::string> diagnostics;
};

struct Crossing {
  std::string reference;  // "baseline" or "deterministic"
  bool upward = true;     // corrected GEOF rises above the reference
  double g2 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;   // ascending g^2
  std::vector<Crossing> crossings;
  std::vector<std::string> diagnostics;
  double max_disagreement = 0.0;
  int threads = 1;
  int base_points = 0;
  int densified_points = 0;
  double wall_seconds = 0.0;
};

PointReport run_point(const SweepConfig& config, double g2);

SweepResult run_sweep(const SweepConfig& config);

// Worker-pool width: CVQEC_THREADS, then config.threads, then the hardware.
int worker_count(const SweepConfig& config);

// Linear interpolation between the two rows that bracket each sign change.
std::vector<Crossing> find_crossings(const std::vector<SweepRow>& rows);

extern const char* const kCsvHeader;

// Throws NumericalFailure on any non-finite value.
std::string format_csv(const std::vector<SweepRow>& rows);
std::string format_metadata(const SweepConfig& config, const SweepResult& result);
std::string format_report(const SweepConfig& config, const PointReport& report);

// Writes config.output and config.output + ".meta.json".
void write_sweep(const SweepConfig& config, const SweepResult& result);

std::string version();

}  // namespace cvqec::experiment
