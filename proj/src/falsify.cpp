#include "falsar/falsify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <memory>
#include <stdexcept>
#include <utility>

#include "falsar/bandit.hpp"
#include "falsar/rng.hpp"

namespace falsar {

namespace {

using stl::Formula;
using stl::FormulaPtr;

void require_channels(const SystemModel& m, const Formula& f) {
  const auto& outs = m.outputs();
  for (const auto& ch : stl::collect_channels(f)) {
    if (std::find(outs.begin(), outs.end(), ch) == outs.end()) {
      throw std::invalid_argument("falsify: formula channel '" + ch +
                                  "' is not an output of model '" + m.name() +
                                  "'");
    }
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Two-arm drivers differ only in the per-play objective; everything else
// (bandit bookkeeping, per-arm optimizer state, stopping, verification)
// is shared here.
FalsificationResult run_mab(const SystemModel& m, const SafetySpec& spec,
                            const FalsifyOptions& options, bool conjunctive) {
  require_channels(m, *spec.original);
  const bool use_ucb = options.mab == "ucb";
  if (!use_ucb && options.mab != "egreedy") {
    throw std::invalid_argument("falsify: unknown bandit strategy '" +
                                options.mab + "' (ucb, egreedy)");
  }

  Stopwatch clock;
  FalsificationResult res;
  res.rb = stl::kInf;
  if (options.budget == 0) {
    res.seconds = clock.seconds();
    return res;
  }

  const InputSpace space(m, options.control_points);
  const std::array<FormulaPtr, 2> phis = {spec.phi1, spec.phi2};

  // Each arm owns its optimizer and history; interleaved plays of the
  // other arm are invisible to it.
  struct ArmState {
    FormulaPtr objective;  // conjunctive: alw_I(phi_i); disjunctive: phi_i
    std::unique_ptr<Optimizer> opt;
    History hist;
  };
  std::array<ArmState, 2> arms;
  for (std::size_t i = 0; i < 2; ++i) {
    arms[i].objective = conjunctive
                            ? stl::make_always(spec.interval, phis[i])
                            : phis[i];
    arms[i].opt = make_optimizer(options.optimizer, space,
                                 derive_seed(options.seed, i), options.opt);
  }

  BanditHistory bandit(2);
  Rng pick_rng(derive_seed(options.seed, 2));

  double best = stl::kInf;
  for (std::size_t k = 1; k <= options.budget; ++k) {
    if (clock.seconds() >= options.timeout_s) {
      res.timed_out = true;
      break;
    }
    const std::size_t arm = use_ucb
                                ? select_ucb1(bandit, options.mab_c)
                                : select_epsilon_greedy(bandit, options.mab_eps,
                                                        pick_rng);
    ArmState& a = arms[arm];

    const std::vector<double> x = a.opt->suggest(a.hist);
    const Signal u = space.decode(x);
    const Signal y = m.simulate(u);

    double rb_k;
    if (conjunctive) {
      // rob(alw_I phi_i) upper-bounds the conjunctive property, so a
      // negative value falsifies it outright.
      rb_k = stl::eval_robust(*a.objective, y);
    } else {
      // Minimize phi_i only where the other disjunct already failed;
      // when it failed nowhere, fall back to the whole property so the
      // optimizer and the bandit still get a finite value.
      const TimeSet S =
          stl::falsified_time_set(*phis[1 - arm], y, spec.interval);
      rb_k = S.empty() ? stl::eval_robust(*spec.original, y)
                       : stl::eval_robust_restricted(*a.objective, y, S);
    }

    a.opt->observe(x, rb_k);
    a.hist.push_back({x, rb_k});
    bandit.record(arm, rb_k);

    best = std::min(best, rb_k);
    res.simulations = k;
    res.trace.push_back({k, static_cast<int>(arm), rb_k, best});

    if (rb_k < 0.0) {
      // Both negative-arm arguments bound the property's robustness from
      // above, but the claim is checked against the original formula, not
      // assumed.
      const double rb_full = stl::eval_robust(*spec.original, y);
      if (rb_full < 0.0) {
        res.falsified = true;
        res.witness = u;
        res.rb = rb_full;
        res.seconds = clock.seconds();
        return res;
      }
    }
  }
  res.rb = best;
  res.seconds = clock.seconds();
  return res;
}

}  // namespace

SafetySpec classify_spec(const FormulaPtr& f) {
  if (f == nullptr) {
    throw std::invalid_argument("classify_spec: null formula");
  }
  SafetySpec s;
  s.original = f;
  if (f->kind != Formula::Kind::Always) return s;
  const FormulaPtr& body = f->a;
  if (body->kind == Formula::Kind::And) {
    s.shape = SpecShape::Conjunctive;
  } else if (body->kind == Formula::Kind::Or) {
    s.shape = SpecShape::Disjunctive;
  } else {
    return s;
  }
  s.interval = f->interval;
  s.phi1 = body->a;
  s.phi2 = body->b;
  return s;
}

FalsificationResult falsify_hc(const SystemModel& m,
                               const FormulaPtr& formula,
                               const FalsifyOptions& options) {
  if (formula == nullptr) {
    throw std::invalid_argument("falsify_hc: null formula");
  }
  if (options.budget < 1) {
    throw std::invalid_argument("falsify_hc: budget must be >= 1");
  }
  require_channels(m, *formula);

  Stopwatch clock;
  const InputSpace space(m, options.control_points);
  auto opt = make_optimizer(options.optimizer, space, options.seed,
                            options.opt);

  FalsificationResult res;
  History hist;
  double best = stl::kInf;
  for (std::size_t k = 1; k <= options.budget; ++k) {
    if (clock.seconds() >= options.timeout_s) {
      res.timed_out = true;
      break;
    }
    const std::vector<double> x = opt->suggest(hist);
    const Signal u = space.decode(x);
    const Signal y = m.simulate(u);
    const double rb = stl::eval_robust(*formula, y);

    opt->observe(x, rb);
    hist.push_back({x, rb});

    best = std::min(best, rb);
    res.simulations = k;
    res.trace.push_back({k, -1, rb, best});

    if (rb < 0.0) {
      res.falsified = true;
      res.witness = u;
      res.rb = rb;
      res.seconds = clock.seconds();
      return res;
    }
  }
  res.rb = best;
  res.seconds = clock.seconds();
  return res;
}

FalsificationResult falsify_mab_conj(const SystemModel& m,
                                     const SafetySpec& spec,
                                     const FalsifyOptions& options) {
  if (spec.shape != SpecShape::Conjunctive) {
    throw std::invalid_argument(
        "falsify_mab_conj: spec is not of shape alw_I(p and q)");
  }
  return run_mab(m, spec, options, /*conjunctive=*/true);
}

FalsificationResult falsify_mab_disj(const SystemModel& m,
                                     const SafetySpec& spec,
                                     const FalsifyOptions& options) {
  if (spec.shape != SpecShape::Disjunctive) {
    throw std::invalid_argument(
        "falsify_mab_disj: spec is not of shape alw_I(p or q)");
  }
  return run_mab(m, spec, options, /*conjunctive=*/false);
}

FalsificationResult falsify(const SystemModel& m, const FormulaPtr& formula,
                            const std::string& algo,
                            const FalsifyOptions& options) {
  if (algo == "hc") return falsify_hc(m, formula, options);
  if (algo == "mab-ucb" || algo == "mab-egreedy") {
    FalsifyOptions o = options;
    o.mab = algo == "mab-ucb" ? "ucb" : "egreedy";
    const SafetySpec spec = classify_spec(formula);
    switch (spec.shape) {
      case SpecShape::Conjunctive:
        return falsify_mab_conj(m, spec, o);
      case SpecShape::Disjunctive:
        return falsify_mab_disj(m, spec, o);
      case SpecShape::Plain:
        break;
    }
    throw std::invalid_argument(
        "falsify: '" + algo +
        "' needs a property of shape alw_I(p and q) or alw_I(p or q); got " +
        stl::to_string(*formula));
  }
  throw std::invalid_argument("falsify: unknown algorithm '" + algo +
                              "' (hc, mab-ucb, mab-egreedy)");
}

}  // namespace falsar
