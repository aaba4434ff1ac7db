// falsar: command-line front end.
//
//   falsar falsify --model car --spec "alw_[0,30](speed < 120)" ...
//       run one falsification search, print a JSON result
//   falsar bench --config experiment.json ...
//       run a whole campaign, print the summary CSV
//   falsar monitor --spec "..." --trace trace.csv
//       evaluate the robustness of a spec on a recorded trace
//
// FALSAR_SEED, when set, is the default seed / base seed.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "falsar/csv.hpp"
#include "falsar/falsify.hpp"
#include "falsar/harness.hpp"
#include "falsar/stl.hpp"
#include "falsar/systems.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("FALSAR_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') {
    throw std::invalid_argument(std::string("FALSAR_SEED: not a number: ") + s);
  }
  return static_cast<std::uint64_t>(v);
}

std::map<std::string, double> parse_params(
    const std::vector<std::string>& kvs) {
  std::map<std::string, double> out;
  for (const std::string& kv : kvs) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--param expects name=value, got '" + kv +
                                  "'");
    }
    const std::string val = kv.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') {
      throw std::invalid_argument("--param " + kv + ": bad number '" + val +
                                  "'");
    }
    out[kv.substr(0, eq)] = v;
  }
  return out;
}

// "channel:k" with integer k, e.g. "speed:3" or "speed:-2".
std::pair<std::string, int> parse_scale(const std::string& s) {
  const std::size_t colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw std::invalid_argument("--scale expects channel:k, got '" + s + "'");
  }
  const std::string ks = s.substr(colon + 1);
  char* end = nullptr;
  const long k = std::strtol(ks.c_str(), &end, 10);
  if (end == ks.c_str() || *end != '\0') {
    throw std::invalid_argument("--scale " + s + ": bad exponent '" + ks +
                                "'");
  }
  return {s.substr(0, colon), static_cast<int>(k)};
}

// JSON numbers cannot hold infinities; fall back to their text form.
json json_number(double v) {
  if (std::isfinite(v)) return v;
  return falsar::format_double(v);
}

int run_falsify(const std::string& model_name,
                const std::vector<std::string>& params,
                const std::string& spec_text, const std::string& algo,
                const falsar::FalsifyOptions& options, const std::string& scale,
                const std::string& witness_path, bool with_trace) {
  falsar::ModelPtr model =
      falsar::load_model(model_name, parse_params(params));
  falsar::stl::FormulaPtr formula = falsar::stl::parse(spec_text);
  if (!scale.empty()) {
    const auto [channel, k] = parse_scale(scale);
    model = falsar::scale_output(model, channel, k);
    formula = falsar::scale_formula(formula, channel, k);
  }

  const falsar::FalsificationResult r =
      falsar::falsify(*model, formula, algo, options);

  json out;
  out["algo"] = algo;
  out["falsified"] = r.falsified;
  out["timed_out"] = r.timed_out;
  out["robustness"] = json_number(r.rb);
  out["simulations"] = r.simulations;
  out["seconds"] = r.seconds;
  if (r.witness) out["witness_csv"] = falsar::signal_to_csv(*r.witness);
  if (with_trace) {
    json trace = json::array();
    for (const auto& step : r.trace) {
      trace.push_back({{"k", step.k},
                       {"arm", step.arm},
                       {"rb", json_number(step.rb)},
                       {"best_rb", json_number(step.best_rb)}});
    }
    out["trace"] = std::move(trace);
  }
  std::cout << out.dump(2) << "\n";

  if (!witness_path.empty() && r.witness) {
    falsar::write_signal_csv(*r.witness, witness_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "falsar: black-box falsification of hybrid-system models against "
      "signal temporal logic safety specifications"};
  app.require_subcommand(1);

  // ---- falsify ----
  auto* fal = app.add_subcommand("falsify",
                                 "Search for an input trace that violates "
                                 "a safety property");
  std::string f_model = "car";
  std::vector<std::string> f_params;
  std::string f_spec;
  std::string f_algo = "hc";
  std::string f_scale;
  std::string f_witness_path;
  bool f_trace = false;
  falsar::FalsifyOptions f_opts;
  fal->add_option("--model", f_model, "Model name: car, fuel, synthetic")
      ->capture_default_str();
  fal->add_option("--param", f_params,
                  "Model parameter name=value (repeatable)");
  fal->add_option("--spec", f_spec, "Specification text")->required();
  fal->add_option("--algo", f_algo, "hc, mab-ucb or mab-egreedy")
      ->capture_default_str();
  fal->add_option("--budget", f_opts.budget, "Max simulations")
      ->capture_default_str();
  fal->add_option("--timeout", f_opts.timeout_s, "Wall-clock limit, seconds");
  auto* f_seed_opt = fal->add_option("--seed", f_opts.seed, "RNG seed");
  fal->add_option("--optimizer", f_opts.optimizer,
                  "cmaes, anneal or random")
      ->capture_default_str();
  fal->add_option("--control-points", f_opts.control_points,
                  "Piecewise-constant segments per input channel")
      ->capture_default_str();
  fal->add_option("--mab-eps", f_opts.mab_eps,
                  "Exploration rate for mab-egreedy")
      ->capture_default_str();
  fal->add_option("--mab-c", f_opts.mab_c, "Exploration weight for mab-ucb")
      ->capture_default_str();
  fal->add_option("--scale", f_scale,
                  "Scale an output channel and the matching spec constants "
                  "by 10^k, as channel:k");
  fal->add_option("--witness-csv", f_witness_path,
                  "Write the falsifying input trace here (CSV)");
  fal->add_flag("--trace", f_trace, "Include the per-iteration search trace "
                                    "in the JSON output");

  // ---- bench ----
  auto* ben = app.add_subcommand(
      "bench", "Run a falsification campaign from a JSON config");
  std::string b_config;
  std::size_t b_trials = 0, b_budget = 0, b_jobs = 0;
  std::uint64_t b_seed = 0;
  double b_timeout = 0.0;
  std::string b_raw_csv, b_summary_csv;
  ben->add_option("--config", b_config, "Experiment config (JSON)")
      ->required();
  auto* b_trials_opt = ben->add_option("--trials", b_trials,
                                       "Override: trials per combination");
  auto* b_budget_opt =
      ben->add_option("--budget", b_budget, "Override: max simulations");
  auto* b_seed_opt = ben->add_option("--seed", b_seed, "Override: base seed");
  auto* b_timeout_opt = ben->add_option("--timeout", b_timeout,
                                        "Override: per-trial limit, seconds");
  auto* b_jobs_opt =
      ben->add_option("--jobs", b_jobs, "Override: worker threads");
  auto* b_raw_opt =
      ben->add_option("--raw-csv", b_raw_csv, "Override: raw results path");
  auto* b_summary_opt = ben->add_option("--summary-csv", b_summary_csv,
                                        "Override: summary path");

  // ---- monitor ----
  auto* mon = app.add_subcommand(
      "monitor", "Evaluate the robustness of a spec on a recorded trace");
  std::string m_spec, m_trace;
  mon->add_option("--spec", m_spec, "Specification text")->required();
  mon->add_option("--trace", m_trace, "Trace CSV (time,channel,... header)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fal->parsed()) {
      if (f_seed_opt->count() == 0) {
        if (const auto s = env_seed()) f_opts.seed = *s;
      }
      return run_falsify(f_model, f_params, f_spec, f_algo, f_opts, f_scale,
                         f_witness_path, f_trace);
    }
    if (ben->parsed()) {
      falsar::ExperimentConfig cfg = falsar::load_config(b_config);
      if (b_seed_opt->count() == 0) {
        if (const auto s = env_seed()) cfg.base_seed = *s;
      } else {
        cfg.base_seed = b_seed;
      }
      if (b_trials_opt->count()) cfg.trials = b_trials;
      if (b_budget_opt->count()) cfg.budget = b_budget;
      if (b_timeout_opt->count()) cfg.timeout_s = b_timeout;
      if (b_jobs_opt->count()) cfg.jobs = b_jobs;
      if (b_raw_opt->count()) cfg.raw_csv = b_raw_csv;
      if (b_summary_opt->count()) cfg.summary_csv = b_summary_csv;
      const std::vector<falsar::TrialResult> raw = falsar::run_experiment(cfg);
      std::cout << falsar::summary_csv_text(falsar::aggregate(raw));
      return 0;
    }
    if (mon->parsed()) {
      const falsar::Signal w = falsar::read_signal_csv(m_trace);
      const falsar::stl::FormulaPtr f = falsar::stl::parse(m_spec);
      std::cout << falsar::format_double(falsar::stl::eval_robust(*f, w))
                << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "falsar: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
