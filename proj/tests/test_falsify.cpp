#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "falsar/falsify.hpp"
#include "falsar/signal.hpp"
#include "falsar/stl.hpp"
#include "falsar/systems.hpp"

namespace {

using namespace falsar;

FalsifyOptions base_options(std::size_t budget, std::uint64_t seed) {
  FalsifyOptions o;
  o.budget = budget;
  o.seed = seed;
  return o;
}

void check_trace_shape(const FalsificationResult& r, std::size_t budget) {
  CHECK(r.simulations <= budget);
  REQUIRE(r.trace.size() == r.simulations);
  double best = stl::kInf;
  for (std::size_t j = 0; j < r.trace.size(); ++j) {
    CHECK(r.trace[j].k == j + 1);
    best = std::min(best, r.trace[j].rb);
    CHECK(r.trace[j].best_rb == best);
  }
}

// Replays a result's witness through the model and checks it falsifies
// the original formula with exactly the robustness the result reports.
void check_witness(const SystemModel& m, const stl::Formula& original,
                   const FalsificationResult& r) {
  REQUIRE(r.falsified);
  REQUIRE(r.witness.has_value());
  const Signal y = m.simulate(*r.witness);
  const double rb = stl::eval_robust(original, y);
  CHECK(rb < 0.0);
  CHECK(rb == r.rb);
}

// Fixed output trace regardless of the input values (but still causal:
// the reply is cut to the input's length).
class PlaybackModel final : public SystemModel {
 public:
  PlaybackModel(std::vector<std::string> outs, double step, double horizon,
                std::vector<double> samples)
      : outs_(std::move(outs)),
        step_(step),
        horizon_(horizon),
        samples_(std::move(samples)) {}

  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return ins_; }
  const std::vector<std::string>& outputs() const override { return outs_; }
  double horizon() const override { return horizon_; }
  double step() const override { return step_; }

  Signal simulate(const Signal& u) const override {
    std::vector<double> head(samples_.begin(),
                             samples_.begin() +
                                 static_cast<std::ptrdiff_t>(u.rows() *
                                                             outs_.size()));
    return Signal(outs_, step_, std::move(head));
  }

 private:
  std::string name_ = "playback";
  std::vector<InputChannel> ins_ = {{"din", 0.0, 1.0}};
  std::vector<std::string> outs_;
  double step_;
  double horizon_;
  std::vector<double> samples_;
};

// Smooth, unfalsifiable two-output landscape: y1 = u1/2 (so y1 < 0.75
// holds with margin >= 0.25) and y2 = u2/2 + 0.1 (y2 < 0.8 with margin
// >= 0.2). Both margins shrink as the inputs grow, giving the bandit
// real gains without a reachable counterexample.
class BowlModel final : public SystemModel {
 public:
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return ins_; }
  const std::vector<std::string>& outputs() const override { return outs_; }
  double horizon() const override { return 8.0; }
  double step() const override { return 1.0; }

  Signal simulate(const Signal& u) const override {
    std::vector<double> out;
    out.reserve(u.rows() * 2);
    for (std::size_t j = 0; j < u.rows(); ++j) {
      out.push_back(0.5 * u.at(j, 0));
      out.push_back(0.5 * u.at(j, 1) + 0.1);
    }
    return Signal(outs_, step(), std::move(out));
  }

 private:
  std::string name_ = "bowl";
  std::vector<InputChannel> ins_ = {{"u1", 0.0, 1.0}, {"u2", 0.0, 1.0}};
  std::vector<std::string> outs_ = {"y1", "y2"};
};

// Disjunction testbed with both per-disjunct failure sets forced
// nonempty on every trace: rows 7..9 pin y1 high with y2 safe, rows
// 10..12 the reverse, and rows 0..6 echo the inputs. The disjunction
// fails only when the search drives u1 > 0.75 and u2 > 0.8 at a common
// echoed instant.
class StaggerModel final : public SystemModel {
 public:
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return ins_; }
  const std::vector<std::string>& outputs() const override { return outs_; }
  double horizon() const override { return 12.0; }
  double step() const override { return 1.0; }

  Signal simulate(const Signal& u) const override {
    std::vector<double> out;
    out.reserve(u.rows() * 2);
    for (std::size_t j = 0; j < u.rows(); ++j) {
      if (j >= 7 && j <= 9) {
        out.push_back(2.0);
        out.push_back(0.0);
      } else if (j >= 10) {
        out.push_back(0.0);
        out.push_back(2.0);
      } else {
        out.push_back(u.at(j, 0));
        out.push_back(u.at(j, 1));
      }
    }
    return Signal(outs_, step(), std::move(out));
  }

 private:
  std::string name_ = "stagger";
  std::vector<InputChannel> ins_ = {{"u1", 0.0, 1.0}, {"u2", 0.0, 1.0}};
  std::vector<std::string> outs_ = {"y1", "y2"};
};

// One output rides at 2 forever, so the disjunction below is satisfied
// on every reachable trace and one arm's failure set is always empty.
class SafeGuardModel final : public SystemModel {
 public:
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return ins_; }
  const std::vector<std::string>& outputs() const override { return outs_; }
  double horizon() const override { return 6.0; }
  double step() const override { return 1.0; }

  Signal simulate(const Signal& u) const override {
    std::vector<double> out;
    out.reserve(u.rows() * 2);
    for (std::size_t j = 0; j < u.rows(); ++j) {
      out.push_back(2.0);
      out.push_back(2.0 * u.at(j, 0) - 1.0);
    }
    return Signal(outs_, step(), std::move(out));
  }

 private:
  std::string name_ = "safeguard";
  std::vector<InputChannel> ins_ = {{"u1", 0.0, 1.0}};
  std::vector<std::string> outs_ = {"a", "b"};
};

}  // namespace

TEST_CASE("classify_spec recognizes the two-arm safety shapes") {
  const auto disj = classify_spec(
      stl::parse("alw_[0,30]((gear==4) -> (speed>35))"));
  CHECK(disj.shape == SpecShape::Disjunctive);
  CHECK(disj.interval.lo == 0.0);
  CHECK(disj.interval.hi == 30.0);
  REQUIRE(disj.phi1 != nullptr);
  REQUIRE(disj.phi2 != nullptr);
  CHECK(stl::equals(*disj.phi1, *stl::parse("not (gear==4)")));
  CHECK(stl::equals(*disj.phi2, *stl::parse("speed > 35")));
  CHECK(stl::equals(*disj.original,
                    *stl::parse("alw_[0,30]((gear==4) -> (speed>35))")));

  const auto conj = classify_spec(
      stl::parse("alw_[0,30]((speed<135) and (rpm<4780))"));
  CHECK(conj.shape == SpecShape::Conjunctive);
  CHECK(stl::equals(*conj.phi1, *stl::parse("speed < 135")));
  CHECK(stl::equals(*conj.phi2, *stl::parse("rpm < 4780")));

  const auto plain_ev = classify_spec(stl::parse("ev_[0,5](x>0)"));
  CHECK(plain_ev.shape == SpecShape::Plain);
  CHECK(plain_ev.phi1 == nullptr);
  CHECK(plain_ev.phi2 == nullptr);
  CHECK(plain_ev.original != nullptr);

  CHECK(classify_spec(stl::parse("alw_[0,30](speed<120)")).shape ==
        SpecShape::Plain);
  CHECK(classify_spec(stl::parse("(speed<135) until_[0,30] (rpm<4780)"))
            .shape == SpecShape::Plain);

  // An equality atom desugars to a band conjunction, so an always over
  // it is structurally conjunctive.
  CHECK(classify_spec(stl::parse("alw_[0,10](gear==3)")).shape ==
        SpecShape::Conjunctive);

  CHECK_THROWS_AS(classify_spec(nullptr), std::invalid_argument);
}

TEST_CASE("hill climbing returns an immediate witness on a dead spec") {
  const auto m = load_model("synthetic");
  const auto f = stl::parse("alw_[0,10](y1 < y1 - 1)");  // margin -1 always
  const auto res = falsify_hc(*m, f, base_options(50, 11));

  CHECK(res.falsified);
  CHECK(res.simulations == 1);
  CHECK(res.rb == -1.0);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].k == 1);
  CHECK(res.trace[0].arm == -1);
  CHECK(res.trace[0].rb == -1.0);
  CHECK(res.seconds >= 0.0);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->channels() == std::vector<std::string>{"u1", "u2"});
  CHECK(res.witness->rows() == 101);
  check_witness(*m, *f, res);
}

TEST_CASE("hill climbing exhausts the budget on an unfalsifiable spec") {
  const auto m = load_model("car");
  const auto f = stl::parse("alw_[0,30](speed > -1)");
  const auto res = falsify_hc(*m, f, base_options(40, 5));

  CHECK_FALSE(res.falsified);
  CHECK_FALSE(res.witness.has_value());
  CHECK(res.simulations == 40);
  check_trace_shape(res, 40);
  for (const auto& it : res.trace) CHECK(it.rb > 0.0);
  CHECK(res.rb == res.trace.back().best_rb);
  CHECK(res.rb > 0.0);
}

TEST_CASE("budget and shape validation") {
  const auto m = load_model("synthetic");
  const auto conj_f = stl::parse("alw_[0,10]((y1 < 0.5) and (y2 < 0.5))");
  const auto disj_f = stl::parse("alw_[0,10]((y1 < 0.5) or (y2 < 0.5))");
  const auto plain_f = stl::parse("alw_[0,10](y1 < 0.5)");

  CHECK_THROWS_AS(falsify_hc(*m, plain_f, base_options(0, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(falsify_hc(*m, nullptr, base_options(5, 1)),
                  std::invalid_argument);

  const auto conj = classify_spec(conj_f);
  const auto disj = classify_spec(disj_f);

  SUBCASE("zero budget exhausts immediately") {
    for (const char* strategy : {"ucb", "egreedy"}) {
      auto o = base_options(0, 1);
      o.mab = strategy;
      const auto rc = falsify_mab_conj(*m, conj, o);
      CHECK_FALSE(rc.falsified);
      CHECK(rc.simulations == 0);
      CHECK(rc.trace.empty());
      CHECK(std::isinf(rc.rb));
      const auto rd = falsify_mab_disj(*m, disj, o);
      CHECK_FALSE(rd.falsified);
      CHECK(rd.simulations == 0);
    }
  }

  SUBCASE("wrong shapes are rejected") {
    CHECK_THROWS_AS(falsify_mab_conj(*m, disj, base_options(5, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(falsify_mab_conj(*m, classify_spec(plain_f),
                                     base_options(5, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(falsify_mab_disj(*m, conj, base_options(5, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(falsify(*m, plain_f, "mab-ucb", base_options(5, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(falsify(*m, conj_f, "newton", base_options(5, 1)),
                    std::invalid_argument);
  }

  SUBCASE("formula channels must be model outputs") {
    const auto bad = stl::parse("alw_[0,10](bogus < 1)");
    CHECK_THROWS_AS(falsify_hc(*m, bad, base_options(5, 1)),
                    std::invalid_argument);
    const auto bad2 = stl::parse("alw_[0,10]((y1 < 0.5) and (bogus < 1))");
    CHECK_THROWS_AS(falsify(*m, bad2, "mab-ucb", base_options(5, 1)),
                    std::invalid_argument);
  }

  SUBCASE("unknown bandit strategy is rejected") {
    auto o = base_options(5, 1);
    o.mab = "thompson";
    CHECK_THROWS_AS(falsify_mab_conj(*m, conj, o), std::invalid_argument);
  }
}

TEST_CASE("the bandit funnels plays into the falsifiable conjunct") {
  const auto m = load_model("synthetic", {{"mag1", 1.0}, {"mag2", 1e6}});
  const auto f = stl::parse("alw_[0,10]((y1 < 0.5) and (y2 < 500000))");
  const auto spec = classify_spec(f);
  REQUIRE(spec.shape == SpecShape::Conjunctive);

  int falsified_count = 0;
  std::size_t plays_arm1 = 0, plays_total = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto o = base_options(200, seed);
    o.control_points = 3;
    const auto res = falsify_mab_conj(*m, spec, o);
    check_trace_shape(res, 200);
    // Unplayed arms are initialized first, lowest index first.
    REQUIRE(res.trace.size() >= 2);
    CHECK(res.trace[0].arm == 0);
    CHECK(res.trace[1].arm == 1);
    for (std::size_t j = 2; j < res.trace.size(); ++j) {
      const int arm = res.trace[j].arm;
      REQUIRE((arm == 0 || arm == 1));
      plays_total += 1;
      plays_arm1 += arm == 1 ? 1 : 0;
    }
    if (res.falsified) {
      falsified_count += 1;
      check_witness(*m, *f, res);
    }
  }
  CHECK(falsified_count >= 24);
  CHECK(static_cast<double>(plays_arm1) >=
        0.6 * static_cast<double>(plays_total));
}

TEST_CASE("restricted robustness drives the disjunctive arms") {
  // y1 fails its disjunct exactly on rows 10..12 and y2 exactly on rows
  // 7..9; at each failure the other output sits at 0, so the property
  // itself holds with margin 0.75 resp. 0.8 there.
  std::vector<double> rows;
  for (int j = 0; j <= 12; ++j) {
    if (j >= 10) {
      rows.push_back(2.0);
      rows.push_back(0.0);
    } else if (j >= 7) {
      rows.push_back(0.0);
      rows.push_back(2.0);
    } else {
      rows.push_back(0.0);
      rows.push_back(0.0);
    }
  }
  // Make the property actually false: at row 3 both outputs exceed
  // their thresholds by exactly 1.
  rows[3 * 2 + 0] = 1.75;
  rows[3 * 2 + 1] = 1.8;
  PlaybackModel pm({"y1", "y2"}, 1.0, 12.0, rows);

  const auto f = stl::parse("alw_[0,12]((y1 < 0.75) or (y2 < 0.8))");
  const auto spec = classify_spec(f);
  REQUIRE(spec.shape == SpecShape::Disjunctive);

  // Every simulated trace is the same, so the very first play already
  // minimizes the chosen disjunct over the other's failure instants:
  // min over {3, 10, 11, 12} of (0.75 - y1) = -1 for arm 0 and
  // min over {3, 7, 8, 9} of (0.8 - y2) = -1 for arm 1.
  auto o = base_options(4, 3);
  o.optimizer = "random";
  const auto res = falsify_mab_disj(pm, spec, o);
  CHECK(res.falsified);
  CHECK(res.simulations == 1);
  CHECK(res.trace[0].rb == -1.0);
  CHECK(res.rb == -1.0);  // full-property robustness at row 3
  check_witness(pm, *f, res);
}

TEST_CASE("empty failure sets fall back without fabricating witnesses") {
  SafeGuardModel m;
  const auto f = stl::parse("alw_[0,6]((a > 0) or (b > 0))");
  const auto spec = classify_spec(f);
  REQUIRE(spec.shape == SpecShape::Disjunctive);

  for (const char* strategy : {"ucb", "egreedy"}) {
    auto o = base_options(30, 9);
    o.mab = strategy;
    o.optimizer = "random";
    const auto res = falsify_mab_disj(m, spec, o);
    CHECK_FALSE(res.falsified);
    CHECK_FALSE(res.witness.has_value());
    CHECK(res.simulations == 30);
    // Arm a sees the restricted value over b's failures, arm b the
    // full-property fallback; both equal a's constant margin of 2.
    for (const auto& it : res.trace) CHECK(it.rb == 2.0);
    CHECK(res.rb == 2.0);
    bool saw[2] = {false, false};
    for (const auto& it : res.trace) saw[it.arm] = true;
    CHECK(saw[0]);
    CHECK(saw[1]);
  }
}

TEST_CASE("per-arm rescaling replays the identical search") {
  // The second spec multiplies the first arm's margin by 2^11 and the
  // second's by 2^-2 — powers of two, so every margin, windowed min,
  // gain and reward is the bitwise-scaled image of the unscaled run and
  // the whole search trajectory must replay move for move.
  struct Case {
    std::string base, scaled;
  };
  const Case conj_case = {"alw_[0,8]((y1 < 0.75) and (y2 < 0.8))",
                          "alw_[0,8]((2048*y1 < 1536) and (0.25*y2 < 0.2))"};
  const Case disj_case = {"alw_[0,12]((y1 < 0.75) or (y2 < 0.8))",
                          "alw_[0,12]((2048*y1 < 1536) or (0.25*y2 < 0.2))"};

  const auto run = [](const SystemModel& m, const std::string& text,
                      const char* strategy, const char* optimizer) {
    auto o = base_options(80, 77);
    o.mab = strategy;
    o.optimizer = optimizer;
    o.control_points = 3;
    const auto f = stl::parse(text);
    const auto spec = classify_spec(f);
    return spec.shape == SpecShape::Conjunctive
               ? falsify_mab_conj(m, spec, o)
               : falsify_mab_disj(m, spec, o);
  };

  const auto compare = [](const FalsificationResult& a,
                          const FalsificationResult& b) {
    CHECK(a.falsified == b.falsified);
    REQUIRE(a.simulations == b.simulations);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t j = 0; j < a.trace.size(); ++j) {
      CHECK(a.trace[j].arm == b.trace[j].arm);
      const int exp = a.trace[j].arm == 0 ? 11 : -2;
      CHECK(b.trace[j].rb == std::ldexp(a.trace[j].rb, exp));
    }
    if (a.falsified) {
      REQUIRE(a.witness.has_value());
      REQUIRE(b.witness.has_value());
      CHECK(a.witness->data() == b.witness->data());
    }
  };

  for (const char* strategy : {"ucb", "egreedy"}) {
    for (const char* optimizer : {"cmaes", "random"}) {
      CAPTURE(strategy);
      CAPTURE(optimizer);
      BowlModel bowl;
      const auto a = run(bowl, conj_case.base, strategy, optimizer);
      const auto b = run(bowl, conj_case.scaled, strategy, optimizer);
      CHECK_FALSE(a.falsified);  // margins bounded away from zero
      CHECK(a.simulations == 80);
      compare(a, b);

      StaggerModel stagger;
      const auto c = run(stagger, disj_case.base, strategy, optimizer);
      const auto d = run(stagger, disj_case.scaled, strategy, optimizer);
      compare(c, d);
    }
  }
}

TEST_CASE("identical configurations replay bitwise") {
  const auto m = load_model("synthetic", {{"mag1", 1.0}, {"mag2", 1e3}});
  const auto f = stl::parse("alw_[0,10]((y1 < 0.5) and (y2 < 500))");
  const auto spec = classify_spec(f);

  auto o = base_options(60, 37);
  o.control_points = 3;
  const auto r1 = falsify_mab_conj(*m, spec, o);
  const auto r2 = falsify_mab_conj(*m, spec, o);
  CHECK(r1.falsified == r2.falsified);
  CHECK(r1.rb == r2.rb);
  REQUIRE(r1.simulations == r2.simulations);
  for (std::size_t j = 0; j < r1.trace.size(); ++j) {
    CHECK(r1.trace[j].arm == r2.trace[j].arm);
    CHECK(r1.trace[j].rb == r2.trace[j].rb);
    CHECK(r1.trace[j].best_rb == r2.trace[j].best_rb);
  }
  if (r1.witness.has_value()) {
    REQUIRE(r2.witness.has_value());
    CHECK(r1.witness->data() == r2.witness->data());
  }

  auto o2 = o;
  o2.seed = 38;
  const auto r3 = falsify_mab_conj(*m, spec, o2);
  CHECK(r3.trace[0].rb != r1.trace[0].rb);  // different seed, different start
}

TEST_CASE("the dispatcher routes by algorithm name") {
  const auto m = load_model("synthetic");
  const auto f = stl::parse("alw_[0,10]((y1 < y1 - 1) and (y2 < y2 + 5))");

  const auto hc = falsify(*m, f, "hc", base_options(10, 2));
  CHECK(hc.falsified);  // first conjunct is identically false

  const auto ucb = falsify(*m, f, "mab-ucb", base_options(10, 2));
  CHECK(ucb.falsified);
  CHECK(ucb.trace[0].arm == 0);

  const auto eg = falsify(*m, f, "mab-egreedy", base_options(10, 2));
  CHECK(eg.falsified);
}
