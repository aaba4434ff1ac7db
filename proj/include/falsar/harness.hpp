#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "falsar/falsify.hpp"

namespace falsar {

// A falsification campaign: one model, one specification template, a set
// of algorithms, and repetition/scaling axes. Every (spec instance x
// scale x algorithm x trial) combination becomes one driver run with
// seed = base_seed + trial index.
struct ExperimentConfig {
  std::string model = "synthetic";
  std::map<std::string, double> model_params;

  // Specification text; "$name" placeholders are substituted from the
  // sweep below, one spec instance per value combination.
  std::string spec;
  std::map<std::string, std::vector<double>> sweep;

  std::vector<std::string> algorithms = {"hc", "mab-ucb"};
  std::size_t trials = 30;
  std::size_t budget = 300;
  double timeout_s = 600.0;
  std::uint64_t base_seed = 0;

  // Optional scaling sweep: multiply this output channel (and the
  // matching spec constants) by 10^k for each listed k.
  std::string scale_channel;
  std::vector<int> scale_ks;

  // Search parameters shared by all runs (budget/seed/timeout are taken
  // from the fields above, the bandit flavor from the algorithm name).
  std::string optimizer = "cmaes";
  std::size_t control_points = 5;
  OptimizerOptions opt{};
  double mab_eps = 0.1;
  double mab_c = 1.0;

  std::size_t jobs = 1;
  std::string raw_csv;      // output paths; empty = don't write
  std::string summary_csv;
};

// One row of the raw results table.
struct TrialResult {
  std::string spec_id;  // sweep assignment, e.g. "rho=20.6"; "base" if none
  int scale_k = 0;
  std::string algo;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double robustness = 0.0;
  std::size_t simulations = 0;
  double seconds = 0.0;  // capped to the timeout on timed-out trials
};

// One row of the aggregated table: per (spec instance, scale, algorithm)
// over all its trials. Delta columns compare against the first algorithm
// of the same group and are absent when the symmetric percentage
// difference is undefined (both values zero).
struct SummaryRow {
  std::string spec_id;
  int scale_k = 0;
  std::string algo;
  std::size_t sr = 0;
  std::size_t trials = 0;
  double min_time = 0.0;
  double max_time = 0.0;
  double avg_time = 0.0;
  double avg_simulations = 0.0;
  bool has_delta_sr = false;
  double delta_sr = 0.0;
  bool has_delta_time = false;
  double delta_time = 0.0;
};

// Symmetric percentage difference (m - b)*100 / (0.5*(m + b)).
// m + b must be nonzero.
double delta_pct(double m, double b);

// Runs the whole campaign. Trials run on cfg.jobs worker threads; the
// returned rows are always ordered by (spec instance, scale, algorithm,
// trial) regardless of completion order. Writes the CSV files when the
// config names them.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg);

std::vector<SummaryRow> aggregate(const std::vector<TrialResult>& raw);

// CSV layouts (UTF-8, LF, '.' decimals):
//   raw:     spec_id,scale_k,algo,trial,seed,success,robustness,simulations,seconds
//   summary: spec_id,scale_k,algo,SR,min_time,max_time,avg_time,delta_SR,delta_time
std::string raw_csv_text(const std::vector<TrialResult>& raw);
std::string summary_csv_text(const std::vector<SummaryRow>& rows);
void write_raw_csv(const std::vector<TrialResult>& raw,
                   const std::string& path);
void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path);

// JSON config document; unknown keys are rejected. CLI flags override
// the loaded values (done by the CLI layer, not here).
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// "$name" placeholders replaced with formatted values; a leftover '$'
// after substitution is an error.
std::string substitute_spec_params(
    const std::string& text, const std::map<std::string, double>& values);

}  // namespace falsar
