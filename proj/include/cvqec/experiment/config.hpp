#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvqec/protocol/params.hpp"

namespace cvqec::experiment {

enum class LambdaMode { nominal, optimized, fixed };
enum class Engine { analytic, fock, cross_check };

struct SweepConfig {
  std::string scenario = "custom";

  double eta = 0.01;
  double chi = 0.5;
  double zeta = 0.5;
  double tau = 1.0;
  double epsilon = 1.0;
  double delta = 1.0;

  double g2_min = 1.0;
  double g2_max = 60.0;
  double g2_step = 0.5;
  int densify = 4;  // subdivisions of a grid cell that contains a crossing; 1 disables

  LambdaMode lambda_mode = LambdaMode::optimized;
  double lambda_fixed = 0.0;
  protocol::HeraldMode herald = protocol::HeraldMode::single;
  Engine engine = Engine::analytic;

  double cross_check_tolerance = 1e-8;
  double probe = 0.1;
  double linearity_tolerance = 0.01;
  double geof_tolerance = 1e-9;
  int fock_cutoff = 0;  // 0 picks the default from the resource tail
  int quadrature_order = 40;

  std::string output;
  std::uint64_t seed = 20170101;
  int threads = 0;  // 0: CVQEC_THREADS, else hardware concurrency

  // Fixed protocol parameters at one grid value of g^2.
  protocol::ProtocolParams params(double g2) const;

  // Throws InvalidParameter. An empty or unordered g^2 range is an error.
  void validate() const;
};

struct Preset {
  std::string name;
  std::string description;
  SweepConfig config;
};

const std::vector<Preset>& presets();
SweepConfig preset(std::string_view name);

// Sets one field from its textual key (dashes or underscores) and value.
void apply_setting(SweepConfig& config, std::string_view key, std::string_view value);

using Settings = std::vector<std::pair<std::string, std::string>>;

// Flat `key = value` lines, `#` starts a comment. Returns pairs in file order.
Settings parse_config_text(std::string_view text);
Settings read_config_file(const std::string& path);

// Preset for the scenario named on the command line, else in the file, else
// `custom`; then file settings, then command-line settings on top.
SweepConfig compose_config(std::string_view cli_scenario, const Settings& file, const Settings& cli);

std::vector<double> g2_grid(const SweepConfig& config);

std::string to_string(LambdaMode mode);
std::string to_string(Engine engine);
std::string to_string(protocol::HeraldMode mode);

}  // namespace cvqec::experiment
