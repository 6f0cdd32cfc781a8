#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cvqec/errors.hpp"
#include "cvqec/experiment/config.hpp"
#include "cvqec/experiment/sweep.hpp"

namespace {

using cvqec::experiment::Settings;
using cvqec::experiment::SweepConfig;

enum Exit { ok = 0, config_error = 2, validation_error = 3, numerical_error = 4 };

// Every tunable is a plain string option so that command-line values go through
// the same parser as config-file values.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> slots;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* cmd) {
    static const std::vector<std::pair<const char*, const char*>> keys = {
        {"eta", "channel transmission"},
        {"chi", "teleporter EPR parameter"},
        {"zeta", "diagnostic EPR parameter"},
        {"tau", "homodyne efficiency"},
        {"epsilon", "single-photon source efficiency"},
        {"delta", "single-photon detector efficiency"},
        {"g2-min", "first intensity gain"},
        {"g2-max", "last intensity gain"},
        {"g2-step", "gain step"},
        {"densify", "subdivisions of grid cells that contain a crossing"},
        {"lambda-mode", "nominal | optimized | fixed"},
        {"lambda", "fixed teleporter gain (implies lambda-mode fixed)"},
        {"herald-mode", "single | both"},
        {"engine", "analytic | fock | cross-check"},
        {"cross-check-tolerance", "largest allowed engine disagreement"},
        {"probe", "characterization probe amplitude"},
        {"linearity-tolerance", "relative gain mismatch allowed between probes"},
        {"geof-tolerance", "squeezing tolerance of the GEOF search"},
        {"cutoff", "Fock cutoff of the EPR modes (0 = automatic)"},
        {"quadrature-order", "Gauss-Hermite order of the Fock engine"},
        {"seed", "seed for optimizer restarts"},
        {"threads", "worker-pool width"},
    };
    slots.reserve(keys.size());
    for (const auto& [key, help] : keys) {
      slots.emplace_back(key, std::string{});
      options.push_back(cmd->add_option(std::string("--") + key, slots.back().second, help));
    }
  }

  Settings given() const {
    Settings out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (options[i]->count() > 0) out.push_back(slots[i]);
    }
    return out;
  }
};

struct Common {
  std::string scenario;
  std::string config_file;
  bool both_patterns = false;
  Overrides overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "preset name (see `presets list`)");
    cmd->add_option("--config", config_file, "key = value settings file");
    cmd->add_flag("--both-patterns", both_patterns, "same as --herald-mode both");
    overrides.attach(cmd);
  }

  SweepConfig resolve(Settings extra = {}) const {
    Settings file;
    if (!config_file.empty()) file = cvqec::experiment::read_config_file(config_file);
    Settings cli = overrides.given();
    if (both_patterns) cli.emplace_back("herald-mode", "both");
    cli.insert(cli.end(), extra.begin(), extra.end());
    return cvqec::experiment::compose_config(scenario, file, cli);
  }
};

int run_sweep(const Common& common, const std::string& out) {
  Settings extra;
  if (!out.empty()) extra.emplace_back("out", out);
  SweepConfig config = common.resolve(extra);
  config.validate();
  if (config.output.empty()) throw cvqec::InvalidParameter("sweep needs an output path (--out)");

  const auto result = cvqec::experiment::run_sweep(config);
  cvqec::experiment::write_sweep(config, result);
  std::printf("wrote %zu rows to %s (%.1f s, %d threads)\n", result.rows.size(), config.output.c_str(),
              result.wall_seconds, result.threads);
  for (const auto& c : result.crossings) {
    std::printf("crossing %-13s %-4s g2 = %.4f\n", c.reference.c_str(), c.upward ? "up" : "down", c.g2);
  }
  if (config.engine == cvqec::experiment::Engine::cross_check && result.max_disagreement > config.cross_check_tolerance) {
    std::fprintf(stderr, "error: engines disagree by %.3g (tolerance %.3g)\n", result.max_disagreement,
                 config.cross_check_tolerance);
    return validation_error;
  }
  return ok;
}

int run_point(const Common& common, double g2) {
  SweepConfig config = common.resolve();
  config.g2_min = config.g2_max = g2;
  config.validate();
  const auto report = cvqec::experiment::run_point(config, g2);
  std::fputs(cvqec::experiment::format_report(config, report).c_str(), stdout);
  if (config.engine == cvqec::experiment::Engine::cross_check &&
      report.row.engine_disagreement > config.cross_check_tolerance) {
    std::fprintf(stderr, "error: engines disagree by %.3g\n", report.row.engine_disagreement);
    return validation_error;
  }
  return ok;
}

int list_presets() {
  for (const auto& p : cvqec::experiment::presets()) {
    const auto& c = p.config;
    std::printf("%-23s eta=%g chi=%g zeta=%g tau=%g epsilon=%g delta=%g  %s\n", p.name.c_str(), c.eta, c.chi, c.zeta,
                c.tau, c.epsilon, c.delta, p.description.c_str());
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-corrected loss channel sweeps with a quantum-scissor amplifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cvqec::experiment::version());

  Common sweep_args, point_args;
  std::string out;
  double g2 = 0.0;

  CLI::App* sweep = app.add_subcommand("sweep", "sweep the amplifier gain and write CSV plus metadata");
  sweep_args.attach(sweep);
  sweep->add_option("--out", out, "CSV output path; metadata goes next to it");

  CLI::App* point = app.add_subcommand("point", "evaluate one gain and print a report");
  point_args.attach(point);
  point->add_option("--g2", g2, "intensity gain g^2")->required();

  CLI::App* presets = app.add_subcommand("presets", "scenario presets");
  presets->require_subcommand(1);
  CLI::App* list = presets->add_subcommand("list", "print every preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*sweep) return run_sweep(sweep_args, out);
    if (*point) return run_point(point_args, g2);
    if (*list) return list_presets();
  } catch (const cvqec::InvalidParameter& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const cvqec::ValidationFailure& e) {
    std::fprintf(stderr, "validation failure: %s\n", e.what());
    return validation_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return numerical_error;
  }
  return ok;
}
