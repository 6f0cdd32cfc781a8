#include "cvqec/experiment/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cvqec/errors.hpp"

namespace cvqec::experiment {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view key) {
  std::string k(trim(key));
  std::replace(k.begin(), k.end(), '_', '-');
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return k;
}

double to_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InvalidParameter("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  v = trim(v);
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidParameter("'" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
  }
  return out;
}

SweepConfig base(double eta, double tau, double epsilon, double delta) {
  SweepConfig c;
  c.eta = eta;
  c.tau = tau;
  c.epsilon = epsilon;
  c.delta = delta;
  return c;
}

Preset make(std::string name, std::string description, SweepConfig c) {
  c.scenario = name;
  return Preset{std::move(name), std::move(description), std::move(c)};
}

}  // namespace

protocol::ProtocolParams SweepConfig::params(double g2) const {
  protocol::ProtocolParams p;
  p.eta = eta;
  p.chi = chi;
  p.zeta = zeta;
  p.g = std::sqrt(g2);
  p.tau = tau;
  p.epsilon = epsilon;
  p.delta = delta;
  p.herald = herald;
  p.lambda = p.nominal_lambda();
  return p;
}

void SweepConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw InvalidParameter(message);
  };
  require(std::isfinite(g2_min) && std::isfinite(g2_max) && std::isfinite(g2_step), "g2 range must be finite");
  require(g2_min >= 1.0, "g2-min must be at least 1 (the scissor cannot attenuate)");
  require(g2_max >= g2_min, "empty g2 range: g2-max is below g2-min");
  require(g2_step > 0.0, "g2-step must be positive");
  require(densify >= 1, "densify must be at least 1");
  require(lambda_mode != LambdaMode::fixed || lambda_fixed > 0.0, "fixed lambda mode needs lambda > 0");
  require(cross_check_tolerance > 0.0, "cross-check tolerance must be positive");
  require(probe > 0.0, "probe amplitude must be positive");
  require(linearity_tolerance > 0.0, "linearity tolerance must be positive");
  require(geof_tolerance > 0.0, "geof tolerance must be positive");
  require(fock_cutoff >= 0, "cutoff must be non-negative");
  require(quadrature_order >= 2, "quadrature order must be at least 2");
  require(threads >= 0, "threads must be non-negative");
  params(g2_min).validate();
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> v;
    v.push_back(make("fig-gain-tuned", "eta=0.01, ideal sources and detectors", base(0.01, 1.0, 1.0, 1.0)));
    v.push_back(make("fig-main", "eta=0.01, tau=0.98, epsilon=0.7, delta=0.9", base(0.01, 0.98, 0.7, 0.9)));
    v.push_back(make("fig-degraded", "eta=0.01, tau=0.98, weaker photon source and detector (epsilon=0.5, delta=0.8)",
                     base(0.01, 0.98, 0.5, 0.8)));
    v.push_back(make("fig-degraded-homodyne", "eta=0.01, weaker homodyne (tau=0.95), epsilon=0.7, delta=0.9",
                     base(0.01, 0.95, 0.7, 0.9)));
    v.push_back(make("fig-deterministic", "eta=0.005, tau=0.98, epsilon=delta=0.9, against the deterministic bound",
                     base(0.005, 0.98, 0.9, 0.9)));
    v.push_back(make("custom", "defaults; set every parameter explicitly", SweepConfig{}));
    return v;
  }();
  return all;
}

SweepConfig preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.config;
  }
  throw InvalidParameter("unknown scenario '" + std::string(name) + "' (see `presets list`)");
}

void apply_setting(SweepConfig& c, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string value(trim(raw_value));
  auto num = [&] { return to_double(key, value); };

  if (key == "scenario") {
    c = preset(value);
  } else if (key == "eta") {
    c.eta = num();
  } else if (key == "chi") {
    c.chi = num();
  } else if (key == "zeta") {
    c.zeta = num();
  } else if (key == "tau") {
    c.tau = num();
  } else if (key == "epsilon") {
    c.epsilon = num();
  } else if (key == "delta") {
    c.delta = num();
  } else if (key == "g2-min") {
    c.g2_min = num();
  } else if (key == "g2-max") {
    c.g2_max = num();
  } else if (key == "g2-step") {
    c.g2_step = num();
  } else if (key == "densify") {
    c.densify = to_int<int>(key, value);
  } else if (key == "lambda-mode") {
    if (value == "nominal") {
      c.lambda_mode = LambdaMode::nominal;
    } else if (value == "optimized") {
      c.lambda_mode = LambdaMode::optimized;
    } else if (value == "fixed") {
      c.lambda_mode = LambdaMode::fixed;
    } else {
      throw InvalidParameter("lambda-mode must be nominal, optimized or fixed");
    }
  } else if (key == "lambda") {
    c.lambda_fixed = num();
    c.lambda_mode = LambdaMode::fixed;
  } else if (key == "herald-mode") {
    if (value == "single") {
      c.herald = protocol::HeraldMode::single;
    } else if (value == "both") {
      c.herald = protocol::HeraldMode::both;
    } else {
      throw InvalidParameter("herald-mode must be single or both");
    }
  } else if (key == "engine") {
    if (value == "analytic") {
      c.engine = Engine::analytic;
    } else if (value == "fock") {
      c.engine = Engine::fock;
    } else if (value == "cross-check") {
      c.engine = Engine::cross_check;
    } else {
      throw InvalidParameter("engine must be analytic, fock or cross-check");
    }
  } else if (key == "cross-check-tolerance") {
    c.cross_check_tolerance = num();
  } else if (key == "probe") {
    c.probe = num();
  } else if (key == "linearity-tolerance") {
    c.linearity_tolerance = num();
  } else if (key == "geof-tolerance") {
    c.geof_tolerance = num();
  } else if (key == "cutoff") {
    c.fock_cutoff = to_int<int>(key, value);
  } else if (key == "quadrature-order") {
    c.quadrature_order = to_int<int>(key, value);
  } else if (key == "out") {
    c.output = value;
  } else if (key == "seed") {
    c.seed = to_int<std::uint64_t>(key, value);
  } else if (key == "threads") {
    c.threads = to_int<int>(key, value);
  } else {
    throw InvalidParameter("unknown setting '" + key + "'");
  }
}

Settings parse_config_text(std::string_view text) {
  Settings out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw InvalidParameter("config line " + std::to_string(line_no) + ": expected `key = value`");
    }
    out.emplace_back(normalize_key(line.substr(0, eq)), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

SweepConfig compose_config(std::string_view cli_scenario, const Settings& file, const Settings& cli) {
  std::string scenario(cli_scenario);
  if (scenario.empty()) {
    for (const auto& [k, v] : file) {
      if (k == "scenario") scenario = v;
    }
  }
  SweepConfig c = preset(scenario.empty() ? "custom" : scenario);
  for (const Settings* layer : {&file, &cli}) {
    for (const auto& [k, v] : *layer) {
      if (normalize_key(k) != "scenario") apply_setting(c, k, v);
    }
  }
  return c;
}

std::vector<double> g2_grid(const SweepConfig& c) {
  c.validate();
  const auto n = static_cast<long>(std::floor((c.g2_max - c.g2_min) / c.g2_step * (1.0 + 1e-12) + 1e-9)) + 1;
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = c.g2_min + static_cast<double>(i) * c.g2_step;
  return g;
}

std::string to_string(LambdaMode mode) {
  switch (mode) {
    case LambdaMode::nominal: return "nominal";
    case LambdaMode::optimized: return "optimized";
    case LambdaMode::fixed: return "fixed";
  }
  return "?";
}

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::analytic: return "analytic";
    case Engine::fock: return "fock";
    case Engine::cross_check: return "cross-check";
  }
  return "?";
}

std::string to_string(protocol::HeraldMode mode) { return mode == protocol::HeraldMode::both ? "both" : "single"; }

}  // namespace cvqec::experiment
