#include "falsar/hillclimb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace falsar {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

InputSpace::InputSpace(std::vector<InputChannel> channels, std::size_t n_cp,
                       double horizon, double step)
    : n_cp_(n_cp), step_(step) {
  if (n_cp < 1) throw std::invalid_argument("input space: need n_cp >= 1");
  if (channels.empty())
    throw std::invalid_argument("input space: no input channels");
  if (!(step > 0.0) || !(horizon >= 0.0))
    throw std::invalid_argument("input space: bad grid");
  rows_ = static_cast<std::size_t>(std::llround(horizon / step)) + 1;
  for (const auto& c : channels) {
    if (!(c.lo < c.hi))
      throw std::invalid_argument("input space: channel '" + c.name +
                                  "' has an empty range");
    names_.push_back(c.name);
    for (std::size_t j = 0; j < n_cp; ++j) {
      lo_.push_back(c.lo);
      hi_.push_back(c.hi);
    }
  }
}

InputSpace::InputSpace(const SystemModel& m, std::size_t n_cp)
    : InputSpace(m.inputs(), n_cp, m.horizon(), m.step()) {}

Signal InputSpace::decode(std::span<const double> x) const {
  if (x.size() != dim())
    throw std::invalid_argument("decode: expected " + std::to_string(dim()) +
                                " coordinates, got " +
                                std::to_string(x.size()));
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!(x[d] >= lo_[d]) || !(x[d] <= hi_[d]))
      throw std::domain_error("decode: coordinate " + std::to_string(d) +
                              " outside [" + std::to_string(lo_[d]) + ", " +
                              std::to_string(hi_[d]) + "]");
  }
  const std::size_t cols = names_.size();
  std::vector<double> data(rows_ * cols);
  for (std::size_t i = 0; i < rows_; ++i) {
    // Equal spans: grid instant i*step falls in span floor(i*n_cp/(rows-1)),
    // with the final instant folded into the last span.
    const std::size_t seg =
        rows_ == 1 ? 0 : std::min(n_cp_ - 1, i * n_cp_ / (rows_ - 1));
    for (std::size_t c = 0; c < cols; ++c) {
      data[i * cols + c] = x[c * n_cp_ + seg];
    }
  }
  return Signal(names_, step_, std::move(data));
}

std::vector<double> InputSpace::sample(Rng& rng) const {
  std::vector<double> x(dim());
  for (std::size_t d = 0; d < x.size(); ++d) {
    x[d] = rng.uniform(lo_[d], hi_[d]);
  }
  return x;
}

namespace {

// Shared bookkeeping: box geometry, the finite cap for +inf observations,
// and the incumbent under the capped ordering.
class OptimizerBase : public Optimizer {
 public:
  OptimizerBase(const InputSpace& space, std::uint64_t seed)
      : space_(space), rng_(seed) {}

  const HistoryEntry* best() const final {
    return has_best_ ? &best_ : nullptr;
  }

 protected:
  // +inf -> worse than everything finite seen so far, but still finite so
  // ranking and acceptance arithmetic stay well defined.
  double capped(double v) {
    if (std::isfinite(v) || v == -kInf) {
      max_finite_ = std::max(max_finite_, v == -kInf ? -1e300 : v);
      min_finite_ = std::min(min_finite_, v == -kInf ? -1e300 : v);
      return v;
    }
    if (max_finite_ == -kInf) return 1e300;  // nothing finite yet
    return max_finite_ + (max_finite_ - min_finite_) + 1.0;
  }

  void track_best(const std::vector<double>& x, double raw) {
    if (raw == kInf) return;  // an unbounded-above value never wins
    if (!has_best_ || raw < best_.rb) {
      best_ = {x, raw};
      has_best_ = true;
    }
  }

  std::vector<double> clamped(std::vector<double> x) const {
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] = std::clamp(x[d], space_.lo()[d], space_.hi()[d]);
    }
    return x;
  }

  InputSpace space_;
  Rng rng_;

 private:
  double max_finite_ = -kInf;
  double min_finite_ = kInf;
  HistoryEntry best_;
  bool has_best_ = false;
};

class RandomOptimizer final : public OptimizerBase {
 public:
  using OptimizerBase::OptimizerBase;

  std::vector<double> suggest(const History&) override {
    return space_.sample(rng_);
  }

  void observe(const std::vector<double>& x, double value) override {
    track_best(x, value);
  }
};

class AnnealOptimizer final : public OptimizerBase {
 public:
  AnnealOptimizer(const InputSpace& space, std::uint64_t seed,
                  const OptimizerOptions& opts)
      : OptimizerBase(space, seed), opts_(opts), temp_(opts.anneal_t0) {}

  std::vector<double> suggest(const History&) override {
    if (!have_current_) return space_.sample(rng_);
    std::vector<double> x(space_.dim());
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double width = space_.hi()[d] - space_.lo()[d];
      x[d] = current_[d] + opts_.anneal_sigma * width * rng_.gaussian();
    }
    return clamped(std::move(x));
  }

  void observe(const std::vector<double>& x, double value) override {
    track_best(x, value);
    const double v = capped(value);
    if (!have_current_) {
      current_ = x;
      current_v_ = v;
      have_current_ = true;
      return;
    }
    // Metropolis rule; at zero temperature only improvements move the
    // walker, which degenerates to greedy descent around the incumbent.
    const double delta = v - current_v_;
    bool accept = delta <= 0.0;
    if (!accept && temp_ > 0.0) {
      accept = rng_.uniform() < std::exp(-delta / temp_);
    }
    if (accept) {
      current_ = x;
      current_v_ = v;
    }
    temp_ *= opts_.anneal_decay;
  }

 private:
  OptimizerOptions opts_;
  double temp_;
  std::vector<double> current_;
  double current_v_ = 0.0;
  bool have_current_ = false;
};

// Population search with a diagonal sampling distribution: lambda draws
// around the mean per generation, the best mu recombined with log-rank
// weights, per-dimension spread re-estimated from the selected step
// lengths, and a global step multiplier steered by a success rule.
class CmaesLiteOptimizer final : public OptimizerBase {
 public:
  CmaesLiteOptimizer(const InputSpace& space, std::uint64_t seed,
                     const OptimizerOptions& opts)
      : OptimizerBase(space, seed) {
    mean_ = space_.sample(rng_);
    sigma_.resize(space_.dim());
    for (std::size_t d = 0; d < sigma_.size(); ++d) {
      sigma_[d] = opts.cmaes_sigma0 * (space_.hi()[d] - space_.lo()[d]);
    }
    weights_.resize(kMu);
    double sum = 0.0;
    for (std::size_t i = 0; i < kMu; ++i) {
      weights_[i] = std::log(static_cast<double>(kMu) + 0.5) -
                    std::log(static_cast<double>(i) + 1.0);
      sum += weights_[i];
    }
    for (double& w : weights_) w /= sum;
  }

  std::vector<double> suggest(const History&) override {
    std::vector<double> x(space_.dim());
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] = mean_[d] + sigma_[d] * rng_.gaussian();
    }
    return clamped(std::move(x));
  }

  void observe(const std::vector<double>& x, double value) override {
    if (value < kInf && (best() == nullptr || value < best()->rb)) {
      gen_improved_ = true;
    }
    track_best(x, value);
    gen_.push_back({x, capped(value)});
    if (gen_.size() < kLambda) return;

    // Lowest suggestion index wins ties: stable sort on the value only.
    std::stable_sort(gen_.begin(), gen_.end(),
                     [](const HistoryEntry& a, const HistoryEntry& b) {
                       return a.rb < b.rb;
                     });
    std::vector<double> new_mean(space_.dim(), 0.0);
    std::vector<double> var(space_.dim(), 0.0);
    for (std::size_t i = 0; i < kMu; ++i) {
      for (std::size_t d = 0; d < space_.dim(); ++d) {
        new_mean[d] += weights_[i] * gen_[i].point[d];
        const double dx = gen_[i].point[d] - mean_[d];
        var[d] += weights_[i] * dx * dx;
      }
    }
    const double scale = gen_improved_ ? 1.1 : 0.85;
    for (std::size_t d = 0; d < space_.dim(); ++d) {
      const double width = space_.hi()[d] - space_.lo()[d];
      // Blend the selected-step estimate into the old spread, then apply
      // the success-rule multiplier, keeping the spread inside sane rails.
      const double est = std::sqrt(0.6 * sigma_[d] * sigma_[d] + 0.4 * var[d]);
      sigma_[d] = std::clamp(est * scale, 1e-9 * width, width);
    }
    mean_ = std::move(new_mean);
    gen_.clear();
    gen_improved_ = false;
  }

 private:
  static constexpr std::size_t kLambda = 10;
  static constexpr std::size_t kMu = 5;

  std::vector<double> mean_;
  std::vector<double> sigma_;
  std::vector<double> weights_;
  std::vector<HistoryEntry> gen_;
  bool gen_improved_ = false;
};

}  // namespace

std::unique_ptr<Optimizer> make_optimizer(const std::string& kind,
                                          const InputSpace& space,
                                          std::uint64_t seed,
                                          const OptimizerOptions& opts) {
  if (kind == "random") return std::make_unique<RandomOptimizer>(space, seed);
  if (kind == "anneal")
    return std::make_unique<AnnealOptimizer>(space, seed, opts);
  if (kind == "cmaes" || kind == "cmaes-lite")
    return std::make_unique<CmaesLiteOptimizer>(space, seed, opts);
  throw std::invalid_argument("unknown optimizer '" + kind +
                              "' (want cmaes, anneal or random)");
}

}  // namespace falsar
