#include "cvqec/experiment/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "cvqec/channel/characterization.hpp"
#include "cvqec/entanglement/geof.hpp"
#include "cvqec/errors.hpp"
#include "cvqec/fock/pipeline.hpp"
#include "cvqec/protocol/analytic.hpp"

#ifndef CVQEC_VERSION
#define CVQEC_VERSION "0.0.0"
#endif

namespace cvqec::experiment {
namespace {

using nlohmann::json;

entanglement::GeofOptions geof_options(const SweepConfig& c) {
  entanglement::GeofOptions o;
  o.r_tolerance = c.geof_tolerance;
  o.seed = c.seed;
  return o;
}

channel::CharacterizationOptions characterization_options(const SweepConfig& c) {
  channel::CharacterizationOptions o;
  o.probe = c.probe;
  o.linearity_tolerance = c.linearity_tolerance;
  return o;
}

fock::PipelineOptions pipeline_options(const SweepConfig& c) {
  fock::PipelineOptions o;
  o.cutoff = c.fock_cutoff;
  o.quadrature_order = c.quadrature_order;
  return o;
}

struct EngineSample {
  channel::EffectiveChannel channel;
  double geof = 0.0;
  double p_success = 0.0;
};

EngineSample sample(const channel::ChannelProbe& probe, double zeta, double lambda, const entanglement::GeofOptions& go) {
  EngineSample s;
  s.channel = probe.at(lambda);
  s.geof = entanglement::geof_from_cov(channel::corrected_covariance(zeta, s.channel), go).value;
  s.p_success = probe.herald_probability();
  return s;
}

double disagreement(const EngineSample& a, const EngineSample& b) {
  return std::max({std::abs(a.channel.eta_eff - b.channel.eta_eff), std::abs(a.channel.added_noise - b.channel.added_noise),
                   std::abs(a.geof - b.geof), std::abs(a.p_success - b.p_success)});
}

// Evaluates fn(i) for i in [0, n) on `threads` workers; the first error is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  const int width = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < width; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void check_finite(const SweepRow& r) {
  for (double v : {r.g2, r.xi, r.lambda_used, r.eta_eff, r.added_noise, r.geof_corrected, r.geof_baseline,
                   r.geof_deterministic, r.p_success, r.saturation_residual, r.engine_disagreement}) {
    if (!std::isfinite(v)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "non-finite value in the row for g2=%.6g", r.g2);
      throw NumericalFailure(buf);
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

double reference_gap(const SweepRow& r, bool deterministic) {
  return r.geof_corrected - (deterministic ? r.geof_deterministic : r.geof_baseline);
}

}  // namespace

const char* const kCsvHeader =
    "g2,xi,lambda_used,eta_eff,added_noise,geof_corrected,geof_baseline,geof_deterministic,p_success,"
    "saturation_residual,engine_disagreement";

std::string version() { return CVQEC_VERSION; }

PointReport run_point(const SweepConfig& config, double g2) {
  const protocol::ProtocolParams params = config.params(g2);
  params.validate();
  const auto go = geof_options(config);
  const auto co = characterization_options(config);

  PointReport report;
  report.lambda_nominal = params.nominal_lambda();
  report.series_order = protocol::series_order(params.chi);

  std::optional<channel::ChannelProbe> analytic, fock;
  if (config.engine != Engine::fock) analytic.emplace(channel::analytic_source(params), co);
  if (config.engine != Engine::analytic) {
    fock.emplace(channel::fock_source(params, fock::Amplifier::quantum_scissor, pipeline_options(config)), co);
    report.resource_cutoff =
        config.fock_cutoff > 0 ? config.fock_cutoff : fock::resource_cutoff(params, fock::Amplifier::quantum_scissor);
  }
  const channel::ChannelProbe& primary = analytic ? *analytic : *fock;

  double lambda = report.lambda_nominal;
  if (config.lambda_mode == LambdaMode::fixed) {
    lambda = config.lambda_fixed;
  } else if (config.lambda_mode == LambdaMode::optimized) {
    optimize::GainOptions opts;
    opts.geof = go;
    report.optimum = optimize::optimize_lambda(primary, params.zeta, report.lambda_nominal, opts);
    lambda = report.optimum->lambda_opt;
    for (const auto& d : report.optimum->diagnostics) report.diagnostics.push_back("optimizer: " + d);
    if (report.optimum->at_upper_edge) throw NumericalFailure("gain optimum stays on the upper bracket edge");
  }

  const EngineSample main = sample(primary, params.zeta, lambda, go);
  SweepRow& row = report.row;
  row.g2 = g2;
  row.xi = params.xi();
  row.lambda_used = lambda;
  row.eta_eff = main.channel.eta_eff;
  row.added_noise = main.channel.added_noise;
  row.geof_corrected = main.geof;
  row.geof_baseline = entanglement::geof_of_r(entanglement::r0_lossy_tmsv(params.zeta, params.eta));
  row.geof_deterministic = channel::deterministic_bound(params.eta);
  row.p_success = main.p_success;
  row.saturation_residual = main.channel.saturation_residual;
  if (config.engine == Engine::cross_check) row.engine_disagreement = disagreement(main, sample(*fock, params.zeta, lambda, go));
  check_finite(row);
  return report;
}

int worker_count(const SweepConfig& config) {
  if (const char* env = std::getenv("CVQEC_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw InvalidParameter("CVQEC_THREADS must be a positive integer");
    return static_cast<int>(n);
  }
  if (config.threads > 0) return config.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Crossing> find_crossings(const std::vector<SweepRow>& rows) {
  std::vector<Crossing> out;
  for (bool det : {false, true}) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double d0 = reference_gap(rows[i], det);
      const double d1 = reference_gap(rows[i + 1], det);
      if ((d0 < 0.0) == (d1 < 0.0)) continue;
      Crossing c;
      c.reference = det ? "deterministic" : "baseline";
      c.upward = d1 > d0;
      c.g2 = rows[i].g2 + (rows[i + 1].g2 - rows[i].g2) * (-d0) / (d1 - d0);
      out.push_back(c);
    }
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> grid = g2_grid(config);
  SweepResult result;
  result.threads = worker_count(config);
  result.base_points = static_cast<int>(grid.size());

  std::vector<PointReport> reports(grid.size());
  parallel_for(grid.size(), result.threads, [&](std::size_t i) { reports[i] = run_point(config, grid[i]); });

  // Local refinement of every cell that contains a crossing.
  std::vector<double> extra;
  if (config.densify > 1) {
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
      bool crosses = false;
      for (bool det : {false, true}) {
        crosses |= (reference_gap(reports[i].row, det) < 0.0) != (reference_gap(reports[i + 1].row, det) < 0.0);
      }
      if (!crosses) continue;
      for (int k = 1; k < config.densify; ++k) extra.push_back(grid[i] + config.g2_step * k / config.densify);
    }
  }
  std::vector<PointReport> refined(extra.size());
  parallel_for(extra.size(), result.threads, [&](std::size_t i) { refined[i] = run_point(config, extra[i]); });
  result.densified_points = static_cast<int>(extra.size());

  reports.insert(reports.end(), std::make_move_iterator(refined.begin()), std::make_move_iterator(refined.end()));
  std::stable_sort(reports.begin(), reports.end(), [](const PointReport& a, const PointReport& b) { return a.row.g2 < b.row.g2; });
  for (const auto& r : reports) {
    result.rows.push_back(r.row);
    result.max_disagreement = std::max(result.max_disagreement, r.row.engine_disagreement);
    for (const auto& d : r.diagnostics) result.diagnostics.push_back("g2=" + fmt(r.row.g2) + " " + d);
  }
  result.crossings = find_crossings(result.rows);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    check_finite(r);
    const double cols[] = {r.g2, r.xi, r.lambda_used, r.eta_eff, r.added_noise, r.geof_corrected, r.geof_baseline,
                           r.geof_deterministic, r.p_success, r.saturation_residual, r.engine_disagreement};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ',';
      out += fmt(cols[i]);
    }
    out += '\n';
  }
  return out;
}

std::string format_metadata(const SweepConfig& c, const SweepResult& r) {
  json meta;
  meta["tool"] = "cvqec";
  meta["version"] = version();
  meta["modules"] = {{"fock-engine", version()},         {"protocol-analytic", version()},
                     {"channel-characterization", version()}, {"gaussian-entanglement", version()},
                     {"gain-optimizer", version()},       {"experiment-cli", version()}};
  meta["scenario"] = c.scenario;
  meta["parameters"] = {{"eta", c.eta},         {"chi", c.chi},     {"zeta", c.zeta},
                        {"tau", c.tau},         {"epsilon", c.epsilon}, {"delta", c.delta}};
  meta["sweep"] = {{"g2_min", c.g2_min}, {"g2_max", c.g2_max}, {"g2_step", c.g2_step}, {"densify", c.densify},
                   {"base_points", r.base_points}, {"densified_points", r.densified_points},
                   {"rows", r.rows.size()}};
  meta["lambda_mode"] = to_string(c.lambda_mode);
  if (c.lambda_mode == LambdaMode::fixed) meta["lambda"] = c.lambda_fixed;
  meta["herald_mode"] = to_string(c.herald);
  meta["engine"] = to_string(c.engine);
  meta["seed"] = c.seed;
  meta["threads"] = r.threads;

  const protocol::ProtocolParams hi = c.params(c.g2_max);
  json cut = {{"series_order", protocol::series_order(c.chi)}, {"quadrature_order", c.quadrature_order}};
  if (c.engine != Engine::analytic) {
    cut["fock_resource_cutoff"] =
        c.fock_cutoff > 0 ? c.fock_cutoff : fock::resource_cutoff(hi, fock::Amplifier::quantum_scissor);
  }
  meta["cutoffs"] = cut;
  meta["tolerances"] = {{"geof_r", c.geof_tolerance},
                        {"linearity", c.linearity_tolerance},
                        {"probe", c.probe},
                        {"cross_check", c.cross_check_tolerance}};
  meta["reference"] = {{"geof_baseline", r.rows.empty() ? 0.0 : r.rows.front().geof_baseline},
                       {"geof_deterministic", r.rows.empty() ? 0.0 : r.rows.front().geof_deterministic}};

  json crossings = json::array();
  json first = {{"baseline", nullptr}, {"deterministic", nullptr}};
  for (const auto& x : r.crossings) {
    crossings.push_back({{"reference", x.reference}, {"direction", x.upward ? "up" : "down"}, {"g2", x.g2}});
    if (x.upward && first[x.reference].is_null()) first[x.reference] = x.g2;
  }
  meta["crossings"] = crossings;
  meta["first_upward_crossing"] = first;
  meta["max_engine_disagreement"] = r.max_disagreement;
  meta["diagnostics"] = r.diagnostics;
  meta["wall_clock_seconds"] = r.wall_seconds;
  return meta.dump(2) + "\n";
}

std::string format_report(const SweepConfig& c, const PointReport& p) {
  const SweepRow& r = p.row;
  std::string out;
  auto line = [&out](const char* key, const std::string& value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%-22s", key);
    out += buf + value + "\n";
  };
  line("scenario", c.scenario);
  line("engine", to_string(c.engine));
  line("herald mode", to_string(c.herald));
  line("lambda mode", to_string(c.lambda_mode));
  line("g2", fmt(r.g2));
  line("xi", fmt(r.xi));
  line("lambda nominal", fmt(p.lambda_nominal));
  line("lambda used", fmt(r.lambda_used));
  line("eta_eff", fmt(r.eta_eff));
  line("added noise", fmt(r.added_noise));
  line("geof corrected", fmt(r.geof_corrected));
  line("geof baseline", fmt(r.geof_baseline));
  line("geof deterministic", fmt(r.geof_deterministic));
  line("p_success", fmt(r.p_success));
  line("saturation residual", fmt(r.saturation_residual));
  if (c.engine == Engine::cross_check) line("engine disagreement", fmt(r.engine_disagreement));
  if (p.optimum) {
    line("geof at nominal", fmt(p.optimum->geof_at_nominal));
    line("optimizer evals", std::to_string(p.optimum->evaluations));
    line("optimizer widenings", std::to_string(p.optimum->widenings));
  }
  line("series order", std::to_string(p.series_order));
  if (p.resource_cutoff > 0) line("fock cutoff", std::to_string(p.resource_cutoff));
  for (const auto& d : p.diagnostics) line("diagnostic", d);
  return out;
}

void write_sweep(const SweepConfig& config, const SweepResult& result) {
  if (config.output.empty()) throw InvalidParameter("sweep needs an output path (--out)");
  const std::string csv = format_csv(result.rows);
  const std::string meta = format_metadata(config, result);
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidParameter("cannot write '" + path + "'");
    f << text;
    if (!f.flush()) throw InvalidParameter("write to '" + path + "' failed");
  };
  write(config.output, csv);
  write(config.output + ".meta.json", meta);
}

}  // namespace cvqec::experiment
