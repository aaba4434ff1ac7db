#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "falsar/rng.hpp"
#include "falsar/signal.hpp"
#include "falsar/systems.hpp"

namespace falsar {

// Box-constrained search space of piecewise-constant input traces: every
// input channel gets n_cp control values in its declared range, each held
// over one of n_cp equal spans of [0, horizon]. Points are flat vectors,
// channel-major: channel c owns coordinates [c*n_cp, (c+1)*n_cp).
class InputSpace {
 public:
  InputSpace(std::vector<InputChannel> channels, std::size_t n_cp,
             double horizon, double step);
  InputSpace(const SystemModel& m, std::size_t n_cp);

  std::size_t dim() const { return lo_.size(); }
  std::size_t control_points() const { return n_cp_; }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

  // Piecewise-constant trace on the model grid. The value over the j-th
  // span of [0, horizon] is the j-th control value of each channel.
  Signal decode(std::span<const double> x) const;

  // Uniform draw from the box.
  std::vector<double> sample(Rng& rng) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> lo_, hi_;  // per flat coordinate
  std::size_t n_cp_;
  double step_;
  std::size_t rows_;
};

struct HistoryEntry {
  std::vector<double> point;
  double rb;
};
// Past (candidate, objective) pairs of one search, oldest first.
using History = std::vector<HistoryEntry>;

// Sequential stochastic minimizers over an InputSpace box. Call order is
// suggest / observe strictly alternating; observe takes the objective of
// the point just suggested. A +inf observation is ranked below every
// finite value seen so far (finite cap), so it never becomes incumbent.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  // Next candidate, always inside the box. `hist` carries this search's
  // own past plays (the caller filters out other arms' history).
  virtual std::vector<double> suggest(const History& hist) = 0;
  virtual void observe(const std::vector<double>& x, double value) = 0;

  // Best finite-valued observation so far; nullptr before the first one.
  virtual const HistoryEntry* best() const = 0;
};

struct OptimizerOptions {
  // Initial per-dimension step of the population search, as a fraction of
  // the box width.
  double cmaes_sigma0 = 0.3;
  // Simulated-annealing schedule: temperature t0 * decay^k in objective
  // units, and Gaussian proposal spread as a fraction of the box width.
  double anneal_t0 = 1.0;
  double anneal_decay = 0.97;
  double anneal_sigma = 0.15;
};

// kinds: "cmaes" (alias "cmaes-lite"), "anneal", "random".
std::unique_ptr<Optimizer> make_optimizer(const std::string& kind,
                                          const InputSpace& space,
                                          std::uint64_t seed,
                                          const OptimizerOptions& opts = {});

}  // namespace falsar
