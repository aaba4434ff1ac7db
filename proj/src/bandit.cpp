#include "falsar/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace falsar {

BanditHistory::BanditHistory(std::size_t arms) {
  if (arms < 1) throw std::invalid_argument("bandit: need at least one arm");
  rbs_.resize(arms);
  rewards_.resize(arms);
}

void BanditHistory::record(std::size_t arm, double rb, double reward) {
  at(arm, rbs_);  // bounds check
  rbs_[arm].push_back(rb);
  rewards_[arm].push_back(reward);
  seq_.push_back(arm);
}

void BanditHistory::record(std::size_t arm, double rb) {
  at(arm, rbs_);
  rbs_[arm].push_back(rb);
  seq_.push_back(arm);
  rewards_[arm].push_back(hill_climbing_gain(*this, arm));
}

double empirical_average(const BanditHistory& h, std::size_t arm) {
  const auto& r = h.rewards(arm);
  if (r.empty())
    throw std::logic_error("bandit: empirical average of an unplayed arm");
  double sum = 0.0;
  for (double v : r) sum += v;
  return sum / static_cast<double>(r.size());
}

double hill_climbing_gain(const BanditHistory& h, std::size_t arm) {
  const auto& rb = h.robustness(arm);
  if (rb.empty()) return 0.0;
  const double max_rb = *std::max_element(rb.begin(), rb.end());
  if (std::fabs(max_rb) < 1e-12) return 0.0;
  return (max_rb - rb.back()) / max_rb;
}

std::size_t select_epsilon_greedy(const BanditHistory& h, double eps,
                                  Rng& rng) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("bandit: epsilon must lie in (0,1)");
  const std::size_t n = h.arms();
  for (std::size_t j = 0; j < n; ++j) {
    if (h.plays(j) == 0) return j;
  }
  std::size_t best = 0;
  double best_mean = empirical_average(h, 0);
  for (std::size_t j = 1; j < n; ++j) {
    const double m = empirical_average(h, j);
    if (m > best_mean) {
      best = j;
      best_mean = m;
    }
  }
  // One draw covers both decisions: u < eps explores, and the position of
  // u inside [0, eps) picks the explored arm uniformly — so the best arm
  // ends up with probability (1 - eps) + eps/n and the rest with eps/n.
  const double u = rng.uniform();
  if (u < eps) {
    const auto j = static_cast<std::size_t>(u / eps * static_cast<double>(n));
    return std::min(j, n - 1);
  }
  return best;
}

std::size_t select_ucb1(const BanditHistory& h, double c) {
  if (!(c > 0.0))
    throw std::invalid_argument("bandit: exploration weight must be > 0");
  const std::size_t n = h.arms();
  for (std::size_t j = 0; j < n; ++j) {
    if (h.plays(j) == 0) return j;
  }
  const double total = static_cast<double>(h.total_plays());
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double bonus =
        c * std::sqrt(2.0 * std::log(total) / static_cast<double>(h.plays(j)));
    const double score = empirical_average(h, j) + bonus;
    if (score > best_score) {
      best = j;
      best_score = score;
    }
  }
  return best;
}

}  // namespace falsar
