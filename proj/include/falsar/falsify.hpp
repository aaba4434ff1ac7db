#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "falsar/hillclimb.hpp"
#include "falsar/signal.hpp"
#include "falsar/stl.hpp"
#include "falsar/systems.hpp"

namespace falsar {

enum class SpecShape { Plain, Conjunctive, Disjunctive };

// A safety property pulled apart for two-arm search: alw_I(phi1 and phi2)
// or alw_I(phi1 or phi2) — implications arrive here already rewritten as
// disjunctions. Anything else is Plain (phi1/phi2 stay null).
struct SafetySpec {
  SpecShape shape = SpecShape::Plain;
  stl::Interval interval{0.0, 0.0};
  stl::FormulaPtr phi1;
  stl::FormulaPtr phi2;
  stl::FormulaPtr original;
};

SafetySpec classify_spec(const stl::FormulaPtr& f);

// One simulation's worth of search progress.
struct IterationRecord {
  std::size_t k = 0;     // 1-based simulation index
  int arm = -1;          // bandit arm played, -1 without a bandit
  double rb = 0.0;       // objective value the search saw at this step
  double best_rb = 0.0;  // running minimum of the column above
};

struct FalsificationResult {
  bool falsified = false;
  // True when the wall-clock limit cut the search short of the budget.
  bool timed_out = false;
  // Falsifying input trace; engaged iff falsified. Re-simulating it and
  // monitoring the original formula reproduces rb below.
  std::optional<Signal> witness;
  // When falsified: the witness's robustness on the original formula
  // (verified, < 0). Otherwise: the smallest per-step objective seen,
  // i.e. the trace's final best_rb; +inf when no simulation ran.
  double rb = 0.0;
  std::size_t simulations = 0;
  double seconds = 0.0;
  std::vector<IterationRecord> trace;
};

struct FalsifyOptions {
  std::size_t budget = 300;  // simulations, shared by drivers and bandits
  // Wall-clock limit checked before each simulation; infinite by default.
  double timeout_s = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::string optimizer = "cmaes";  // cmaes | anneal | random
  std::size_t control_points = 5;
  OptimizerOptions opt{};
  std::string mab = "ucb";  // ucb | egreedy
  double mab_eps = 0.1;
  double mab_c = 1.0;
};

// Single-objective search on the formula's own robustness.
FalsificationResult falsify_hc(const SystemModel& m,
                               const stl::FormulaPtr& formula,
                               const FalsifyOptions& options);

// Two-arm search on alw_I(phi1 and phi2): each step a bandit picks a
// conjunct, hill climbing minimizes rob(alw_I phi_i), and any negative
// arm value falsifies the whole property.
FalsificationResult falsify_mab_conj(const SystemModel& m,
                                     const SafetySpec& spec,
                                     const FalsifyOptions& options);

// Two-arm search on alw_I(phi1 or phi2): the chosen arm's objective is
// its robustness restricted to the instants where the other disjunct
// already failed (full-formula robustness when there are none).
FalsificationResult falsify_mab_disj(const SystemModel& m,
                                     const SafetySpec& spec,
                                     const FalsifyOptions& options);

// Dispatch by algorithm name: "hc", "mab-ucb" or "mab-egreedy". The mab
// algorithms require a conjunctive or disjunctive safety property.
FalsificationResult falsify(const SystemModel& m,
                            const stl::FormulaPtr& formula,
                            const std::string& algo,
                            const FalsifyOptions& options);

}  // namespace falsar
