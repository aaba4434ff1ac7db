#include "falsar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "falsar/csv.hpp"
#include "falsar/stl.hpp"
#include "falsar/systems.hpp"
#include "json.hpp"

namespace falsar {

double delta_pct(double m, double b) {
  if (m + b == 0.0) {
    throw std::domain_error("delta_pct: undefined for m + b == 0");
  }
  return (m - b) * 100.0 / (0.5 * (m + b));
}

std::string substitute_spec_params(
    const std::string& text, const std::map<std::string, double>& values) {
  // Longest name first so "$speed" is never clipped by a "$s" parameter.
  std::vector<std::pair<std::string, double>> by_length(values.begin(),
                                                        values.end());
  std::sort(by_length.begin(), by_length.end(),
            [](const auto& a, const auto& b) {
              return a.first.size() > b.first.size();
            });
  std::string out = text;
  for (const auto& [name, value] : by_length) {
    const std::string key = "$" + name;
    bool used = false;
    std::size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), format_double(value));
      used = true;
    }
    if (!used) {
      throw std::invalid_argument("spec: sweep parameter '" + name +
                                  "' does not appear in \"" + text + "\"");
    }
  }
  if (out.find('$') != std::string::npos) {
    throw std::invalid_argument("spec: unsubstituted parameter left in \"" +
                                out + "\"");
  }
  return out;
}

namespace {

struct SpecInstance {
  std::string id;
  stl::FormulaPtr formula;
};

// One spec instance per combination of sweep values, keys in sorted
// order; ids like "rho=20.6" (or "base" without a sweep).
std::vector<SpecInstance> expand_specs(const ExperimentConfig& cfg) {
  if (cfg.spec.empty()) throw std::invalid_argument("config: spec is empty");
  std::vector<SpecInstance> out;
  if (cfg.sweep.empty()) {
    out.push_back({"base", stl::parse(substitute_spec_params(cfg.spec, {}))});
    return out;
  }
  std::vector<std::string> keys;
  for (const auto& [k, v] : cfg.sweep) {
    if (v.empty()) {
      throw std::invalid_argument("config: sweep '" + k + "' has no values");
    }
    keys.push_back(k);
  }
  std::vector<std::size_t> pick(keys.size(), 0);
  while (true) {
    std::map<std::string, double> vals;
    std::string id;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const double v = cfg.sweep.at(keys[i])[pick[i]];
      vals[keys[i]] = v;
      if (!id.empty()) id += ';';
      id += keys[i] + "=" + format_double(v);
    }
    out.push_back({id, stl::parse(substitute_spec_params(cfg.spec, vals))});
    std::size_t i = keys.size();
    while (i > 0 && ++pick[i - 1] == cfg.sweep.at(keys[i - 1]).size()) {
      pick[--i] = 0;
    }
    if (i == 0) break;
  }
  return out;
}

struct ScaledSetup {
  int k;
  ModelPtr model;
  std::vector<stl::FormulaPtr> formulas;  // parallel to spec instances
};

}  // namespace

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.algorithms.empty()) {
    throw std::invalid_argument("config: no algorithms listed");
  }
  if (cfg.scale_channel.empty() != cfg.scale_ks.empty()) {
    throw std::invalid_argument(
        "config: scale channel and k list must be given together");
  }

  const std::vector<SpecInstance> specs = expand_specs(cfg);
  const ModelPtr base = load_model(cfg.model, cfg.model_params);

  std::vector<ScaledSetup> setups;
  if (cfg.scale_channel.empty()) {
    ScaledSetup s{0, base, {}};
    for (const auto& sp : specs) s.formulas.push_back(sp.formula);
    setups.push_back(std::move(s));
  } else {
    for (const int k : cfg.scale_ks) {
      ScaledSetup s{k, k == 0 ? base : scale_output(base, cfg.scale_channel, k),
                    {}};
      for (const auto& sp : specs) {
        s.formulas.push_back(
            k == 0 ? sp.formula : scale_formula(sp.formula, cfg.scale_channel, k));
      }
      setups.push_back(std::move(s));
    }
  }

  const std::size_t n_specs = specs.size();
  const std::size_t n_setups = setups.size();
  const std::size_t n_algos = cfg.algorithms.size();
  const std::size_t total = n_specs * n_setups * n_algos * cfg.trials;
  std::vector<TrialResult> rows(total);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const std::size_t trial = i % cfg.trials;
      const std::size_t ai = i / cfg.trials % n_algos;
      const std::size_t ki = i / (cfg.trials * n_algos) % n_setups;
      const std::size_t si = i / (cfg.trials * n_algos * n_setups);
      try {
        FalsifyOptions o;
        o.budget = cfg.budget;
        o.timeout_s = cfg.timeout_s;
        o.seed = cfg.base_seed + trial;
        o.optimizer = cfg.optimizer;
        o.control_points = cfg.control_points;
        o.opt = cfg.opt;
        o.mab_eps = cfg.mab_eps;
        o.mab_c = cfg.mab_c;
        const auto& setup = setups[ki];
        const FalsificationResult r = falsify(
            *setup.model, setup.formulas[si], cfg.algorithms[ai], o);

        TrialResult& row = rows[i];
        row.spec_id = specs[si].id;
        row.scale_k = setup.k;
        row.algo = cfg.algorithms[ai];
        row.trial = trial;
        row.seed = o.seed;
        row.success = r.falsified;
        row.robustness = r.rb;
        row.simulations = r.simulations;
        row.seconds = r.timed_out ? cfg.timeout_s : r.seconds;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (!cfg.raw_csv.empty()) write_raw_csv(rows, cfg.raw_csv);
  if (!cfg.summary_csv.empty()) write_summary_csv(aggregate(rows), cfg.summary_csv);
  return rows;
}

std::vector<SummaryRow> aggregate(const std::vector<TrialResult>& raw) {
  if (raw.empty()) throw std::invalid_argument("aggregate: no results");

  std::vector<SummaryRow> rows;
  std::map<std::tuple<std::string, int, std::string>, std::size_t> index;
  std::vector<double> time_sum, sim_sum;
  for (const auto& r : raw) {
    const auto key = std::make_tuple(r.spec_id, r.scale_k, r.algo);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back({r.spec_id, r.scale_k, r.algo, 0, 0, r.seconds, r.seconds,
                      0.0, 0.0, false, 0.0, false, 0.0});
      time_sum.push_back(0.0);
      sim_sum.push_back(0.0);
    }
    SummaryRow& row = rows[it->second];
    row.sr += r.success ? 1 : 0;
    row.trials += 1;
    row.min_time = std::min(row.min_time, r.seconds);
    row.max_time = std::max(row.max_time, r.seconds);
    time_sum[it->second] += r.seconds;
    sim_sum[it->second] += static_cast<double>(r.simulations);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].avg_time = time_sum[i] / static_cast<double>(rows[i].trials);
    rows[i].avg_simulations = sim_sum[i] / static_cast<double>(rows[i].trials);
  }

  // Deltas against the first algorithm listed for the same spec/scale.
  for (auto& row : rows) {
    const SummaryRow* baseline = nullptr;
    for (const auto& cand : rows) {
      if (cand.spec_id == row.spec_id && cand.scale_k == row.scale_k) {
        baseline = &cand;
        break;
      }
    }
    const double m_sr = static_cast<double>(row.sr);
    const double b_sr = static_cast<double>(baseline->sr);
    if (m_sr + b_sr != 0.0) {
      row.has_delta_sr = true;
      row.delta_sr = delta_pct(m_sr, b_sr);
    }
    if (row.avg_time + baseline->avg_time != 0.0) {
      row.has_delta_time = true;
      row.delta_time = delta_pct(row.avg_time, baseline->avg_time);
    }
  }
  return rows;
}

std::string raw_csv_text(const std::vector<TrialResult>& raw) {
  std::string out =
      "spec_id,scale_k,algo,trial,seed,success,robustness,simulations,"
      "seconds\n";
  for (const auto& r : raw) {
    out += r.spec_id;
    out += ',' + std::to_string(r.scale_k);
    out += ',' + r.algo;
    out += ',' + std::to_string(r.trial);
    out += ',' + std::to_string(r.seed);
    out += r.success ? ",1" : ",0";
    out += ',' + format_double(r.robustness);
    out += ',' + std::to_string(r.simulations);
    out += ',' + format_double(r.seconds);
    out += '\n';
  }
  return out;
}

std::string summary_csv_text(const std::vector<SummaryRow>& rows) {
  std::string out =
      "spec_id,scale_k,algo,SR,min_time,max_time,avg_time,delta_SR,"
      "delta_time\n";
  for (const auto& r : rows) {
    out += r.spec_id;
    out += ',' + std::to_string(r.scale_k);
    out += ',' + r.algo;
    out += ',' + std::to_string(r.sr);
    out += ',' + format_double(r.min_time);
    out += ',' + format_double(r.max_time);
    out += ',' + format_double(r.avg_time);
    out += ',';
    if (r.has_delta_sr) out += format_double(r.delta_sr);
    out += ',';
    if (r.has_delta_time) out += format_double(r.delta_time);
    out += '\n';
  }
  return out;
}

namespace {

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << text;
  if (!f) throw std::runtime_error(path + ": write failed");
}

}  // namespace

void write_raw_csv(const std::vector<TrialResult>& raw,
                   const std::string& path) {
  write_text(raw_csv_text(raw), path);
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path) {
  write_text(summary_csv_text(rows), path);
}

ExperimentConfig config_from_json_text(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: not a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") {
        cfg.model = value.get<std::string>();
      } else if (key == "model_params") {
        for (const auto& [k, v] : value.items()) {
          cfg.model_params[k] = v.get<double>();
        }
      } else if (key == "spec") {
        cfg.spec = value.get<std::string>();
      } else if (key == "sweep") {
        for (const auto& [k, v] : value.items()) {
          cfg.sweep[k] = v.get<std::vector<double>>();
        }
      } else if (key == "algorithms") {
        cfg.algorithms = value.get<std::vector<std::string>>();
      } else if (key == "trials") {
        cfg.trials = value.get<std::size_t>();
      } else if (key == "budget") {
        cfg.budget = value.get<std::size_t>();
      } else if (key == "timeout_s") {
        cfg.timeout_s = value.get<double>();
      } else if (key == "seed") {
        cfg.base_seed = value.get<std::uint64_t>();
      } else if (key == "scale") {
        for (const auto& [k, v] : value.items()) {
          if (k == "channel") {
            cfg.scale_channel = v.get<std::string>();
          } else if (k == "ks") {
            cfg.scale_ks = v.get<std::vector<int>>();
          } else {
            throw std::invalid_argument("config: unknown key 'scale." + k +
                                        "'");
          }
        }
      } else if (key == "optimizer") {
        cfg.optimizer = value.get<std::string>();
      } else if (key == "control_points") {
        cfg.control_points = value.get<std::size_t>();
      } else if (key == "cmaes_sigma0") {
        cfg.opt.cmaes_sigma0 = value.get<double>();
      } else if (key == "anneal_t0") {
        cfg.opt.anneal_t0 = value.get<double>();
      } else if (key == "anneal_decay") {
        cfg.opt.anneal_decay = value.get<double>();
      } else if (key == "anneal_sigma") {
        cfg.opt.anneal_sigma = value.get<double>();
      } else if (key == "mab_eps") {
        cfg.mab_eps = value.get<double>();
      } else if (key == "mab_c") {
        cfg.mab_c = value.get<double>();
      } else if (key == "jobs") {
        cfg.jobs = value.get<std::size_t>();
      } else if (key == "raw_csv") {
        cfg.raw_csv = value.get<std::string>();
      } else if (key == "summary_csv") {
        cfg.summary_csv = value.get<std::string>();
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const json::type_error& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " +
                                  e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open config");
  std::ostringstream buf;
  buf << f.rdbuf();
  return config_from_json_text(buf.str());
}

}  // namespace falsar
