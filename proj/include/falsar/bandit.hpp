#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "falsar/rng.hpp"

namespace falsar {

// Play-by-play record of a multi-armed bandit run: which arm was pulled
// when, the robustness each pull achieved, and the reward credited for
// it. Append-only; per-arm reward and robustness lists stay in lockstep.
class BanditHistory {
 public:
  explicit BanditHistory(std::size_t arms);

  std::size_t arms() const { return rbs_.size(); }
  std::size_t total_plays() const { return seq_.size(); }
  std::size_t plays(std::size_t arm) const { return at(arm, rbs_).size(); }
  const std::vector<double>& rewards(std::size_t arm) const {
    return at(arm, rewards_);
  }
  const std::vector<double>& robustness(std::size_t arm) const {
    return at(arm, rbs_);
  }
  const std::vector<std::size_t>& sequence() const { return seq_; }

  // Records one pull with an explicit reward.
  void record(std::size_t arm, double rb, double reward);
  // Records one pull, crediting the arm's hill-climbing gain computed
  // after rb joins its robustness list.
  void record(std::size_t arm, double rb);

 private:
  template <class V>
  const typename V::value_type& at(std::size_t arm, const V& v) const {
    if (arm >= v.size()) {
      throw std::out_of_range("bandit: arm " + std::to_string(arm) + " of " +
                              std::to_string(v.size()));
    }
    return v[arm];
  }

  std::vector<std::vector<double>> rbs_;
  std::vector<std::vector<double>> rewards_;
  std::vector<std::size_t> seq_;
};

// Mean reward of a played arm; throws on an unplayed arm.
double empirical_average(const BanditHistory& h, std::size_t arm);

// Relative drop of the arm's latest robustness below its historical
// maximum: (max - last) / max. Zero for an unplayed arm or when the
// maximum is too close to zero for the ratio to mean anything. Invariant
// under positive rescaling of the arm's whole robustness list.
double hill_climbing_gain(const BanditHistory& h, std::size_t arm);

// With probability 1-eps exploit the empirically best arm, with eps pick
// uniformly among all arms; unplayed arms are visited first (lowest index
// first). Consumes exactly one uniform draw when all arms are played.
std::size_t select_epsilon_greedy(const BanditHistory& h, double eps,
                                  Rng& rng);

// Deterministic upper-confidence-bound rule: play each arm once (lowest
// index first), then argmax of mean + c*sqrt(2*ln(total)/plays), ties to
// the lowest index.
std::size_t select_ucb1(const BanditHistory& h, double c);

}  // namespace falsar
