#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "falsar/rng.hpp"
#include "falsar/signal.hpp"
#include "falsar/stl.hpp"
#include "falsar/systems.hpp"

using falsar::InputChannel;
using falsar::ModelPtr;
using falsar::Rng;
using falsar::Signal;
using falsar::SystemModel;
namespace stl = falsar::stl;

namespace {

Signal constant_input(const SystemModel& m, std::size_t rows,
                      std::vector<double> values) {
  std::vector<std::string> names;
  for (const auto& c : m.inputs()) names.push_back(c.name);
  return Signal::constant(std::move(names), m.step(), rows, values);
}

Signal random_input(Rng& rng, const SystemModel& m, std::size_t rows) {
  std::vector<std::string> names;
  for (const auto& c : m.inputs()) names.push_back(c.name);
  std::vector<double> data(rows * names.size());
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      data[j * names.size() + c] =
          rng.uniform(m.inputs()[c].lo, m.inputs()[c].hi);
    }
  }
  return Signal(std::move(names), m.step(), std::move(data));
}

std::size_t full_rows(const SystemModel& m) {
  return static_cast<std::size_t>(std::llround(m.horizon() / m.step())) + 1;
}

// Deliberately non-causal test double: each output sample averages the
// input from that instant to the end of the trace.
class AcausalMock final : public SystemModel {
 public:
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return in_; }
  const std::vector<std::string>& outputs() const override { return out_; }
  double horizon() const override { return 10.0; }
  double step() const override { return 0.5; }
  Signal simulate(const Signal& u) const override {
    std::vector<double> y(u.rows());
    for (std::size_t j = 0; j < u.rows(); ++j) {
      double s = 0.0;
      for (std::size_t i = j; i < u.rows(); ++i) s += u.at(i, 0);
      y[j] = s / static_cast<double>(u.rows() - j);
    }
    return Signal(out_, u.step(), std::move(y));
  }

 private:
  std::string name_ = "acausal-mock";
  std::vector<InputChannel> in_ = {{"u", 0.0, 1.0}};
  std::vector<std::string> out_ = {"y"};
};

// Fixed-output test double used to hand-check derived channels.
class PlaybackMock final : public SystemModel {
 public:
  explicit PlaybackMock(std::vector<double> samples)
      : samples_(std::move(samples)) {}
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return in_; }
  const std::vector<std::string>& outputs() const override { return out_; }
  double horizon() const override {
    return static_cast<double>(samples_.size() - 1);
  }
  double step() const override { return 1.0; }
  Signal simulate(const Signal& u) const override {
    std::vector<double> head(samples_.begin(),
                             samples_.begin() + static_cast<std::ptrdiff_t>(
                                                    u.rows()));
    return Signal(out_, u.step(), std::move(head));
  }

 private:
  std::vector<double> samples_;
  std::string name_ = "playback-mock";
  std::vector<InputChannel> in_ = {{"u", 0.0, 1.0}};
  std::vector<std::string> out_ = {"x"};
};

}  // namespace

TEST_CASE("car: full throttle accelerates through all gears") {
  const ModelPtr car = falsar::load_model("car");
  const Signal w = car->simulate(
      constant_input(*car, full_rows(*car), {100.0, 0.0}));
  REQUIRE(w.channels() == std::vector<std::string>{"speed", "rpm", "gear"});
  const auto speed = w.column(0);
  const auto rpm = w.column(1);
  const auto gear = w.column(2);
  CHECK(speed.front() == 0.0);
  CHECK(std::is_sorted(speed.begin(), speed.end()));
  CHECK(speed.back() > 30.0);
  CHECK(gear.front() == 1.0);
  CHECK(gear.back() == 4.0);
  for (double g : gear) CHECK((g == 1.0 || g == 2.0 || g == 3.0 || g == 4.0));
  // The rev limit is never reached, whatever the gear.
  CHECK(*std::max_element(rpm.begin(), rpm.end()) < 4780.0);
  for (double r : rpm) CHECK(r >= 900.0);
}

TEST_CASE("car: full brake from standstill holds the car still") {
  const ModelPtr car = falsar::load_model("car");
  const Signal w = car->simulate(
      constant_input(*car, full_rows(*car), {0.0, 325.0}));
  for (std::size_t j = 0; j < w.rows(); ++j) {
    CHECK(w.at(j, 0) == 0.0);
    CHECK(w.at(j, 2) == 1.0);
  }
}

TEST_CASE("car: input validation rejects rather than clamps") {
  const ModelPtr car = falsar::load_model("car");
  CHECK_THROWS_AS(
      car->simulate(constant_input(*car, 11, {150.0, 0.0})),
      std::domain_error);
  CHECK_THROWS_AS(
      car->simulate(constant_input(*car, 11, {50.0, -1.0})),
      std::domain_error);
  // Wrong grid.
  CHECK_THROWS_AS(
      car->simulate(Signal::constant({"throttle", "brake"}, 0.1, 11,
                                     std::vector<double>{50.0, 0.0})),
      std::invalid_argument);
  // Wrong channel order.
  CHECK_THROWS_AS(
      car->simulate(Signal::constant({"brake", "throttle"}, 0.05, 11,
                                     std::vector<double>{0.0, 50.0})),
      std::invalid_argument);
  // Shorter grid-aligned traces are fine.
  CHECK(car->simulate(constant_input(*car, 21, {50.0, 0.0})).rows() == 21);
}

TEST_CASE("built-in models are causal") {
  Rng rng(8080);
  for (const char* name : {"car", "fuel", "synthetic"}) {
    const ModelPtr m = falsar::load_model(name);
    for (int k = 0; k < 30; ++k) {
      const Signal u = random_input(rng, *m, 2 + rng.below(80));
      const Signal u2 = random_input(rng, *m, 1 + rng.below(40));
      CHECK(falsar::check_causality(*m, u, u2, 1e-9));
    }
  }
  // Scaling a channel preserves causality.
  const ModelPtr scaled = falsar::scale_output(falsar::load_model("car"),
                                               "speed", 3);
  const Signal u = random_input(rng, *scaled, 50);
  const Signal u2 = random_input(rng, *scaled, 20);
  CHECK(falsar::check_causality(*scaled, u, u2, 1e-9));
  // A one-sample extension changes nothing and is trivially causal.
  CHECK(falsar::check_causality(*scaled, u, random_input(rng, *scaled, 1),
                                1e-9));
}

TEST_CASE("the causality check catches a future-peeking model") {
  AcausalMock mock;
  const Signal u = Signal::constant({"u"}, 0.5, 6, std::vector<double>{0.0});
  const Signal u2 = Signal::constant({"u"}, 0.5, 6, std::vector<double>{1.0});
  CHECK_FALSE(falsar::check_causality(mock, u, u2, 1e-9));
}

TEST_CASE("powers of ten: exact up and down") {
  CHECK(falsar::scale_pow10(120.0, 3) == 120000.0);
  CHECK(falsar::scale_pow10(120.0, -2) == 1.2);
  CHECK(falsar::scale_pow10(0.05, 0) == 0.05);
  CHECK(falsar::scale_pow10(-4.2, 1) == -42.0);
  CHECK(falsar::scale_pow10(0.0, 5) == 0.0);
}

TEST_CASE("scale_output multiplies one channel and leaves the rest") {
  const ModelPtr car = falsar::load_model("car");
  const ModelPtr scaled = falsar::scale_output(car, "speed", 3);
  CHECK(scaled->outputs() == car->outputs());
  Rng rng(1234);
  const Signal u = random_input(rng, *car, 101);
  const Signal w0 = car->simulate(u);
  const Signal w1 = scaled->simulate(u);
  REQUIRE(w0.rows() == w1.rows());
  for (std::size_t j = 0; j < w0.rows(); ++j) {
    CHECK(w1.at(j, 0) == falsar::scale_pow10(w0.at(j, 0), 3));
    CHECK(std::signbit(w1.at(j, 0)) == std::signbit(w0.at(j, 0)));
    CHECK(w1.at(j, 1) == w0.at(j, 1));
    CHECK(w1.at(j, 2) == w0.at(j, 2));
  }
  // k = 0 is the identity on every sample.
  const Signal w2 = falsar::scale_output(car, "rpm", 0)->simulate(u);
  CHECK(w2.data() == w0.data());
  CHECK_THROWS_AS(falsar::scale_output(car, "velocity", 3),
                  std::invalid_argument);
}

TEST_CASE("scale_formula rewrites constants through the atom structure") {
  const auto up = falsar::scale_formula(
      stl::parse("alw_[0,30](speed < 120)"), "speed", 3);
  CHECK(stl::equals(*up, *stl::parse("alw_[0,30](speed < 120000)")));

  const auto down = falsar::scale_formula(stl::parse("speed < 120"),
                                          "speed", -2);
  CHECK(stl::equals(*down, *stl::parse("speed < 1.2")));

  // Other channels' atoms pass through untouched; intervals never change.
  const auto mixed = falsar::scale_formula(
      stl::parse("alw_[0,30]((speed < 120) and (rpm < 4780))"), "speed", 1);
  CHECK(stl::equals(
      *mixed, *stl::parse("alw_[0,30]((speed < 1200) and (rpm < 4780))")));

  CHECK_THROWS_AS(
      falsar::scale_formula(stl::parse("speed + rpm > 0"), "speed", 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      falsar::scale_formula(stl::parse("speed * speed > 0"), "speed", 1),
      std::invalid_argument);
}

TEST_CASE("scaling model and formula together preserves every sign") {
  const ModelPtr car = falsar::load_model("car");
  // Mixed-channel spec: the deciding disjunct may or may not be the scaled
  // one, but each leaf margin keeps its sign, so the verdict never moves.
  const auto spec = stl::parse("alw_[0,30]((gear == 3) -> (speed > 20.6))");
  // Single-channel spec: here the whole margin scales by exactly 10^k.
  const auto pure = stl::parse("alw_[0,30](speed < 120)");
  Rng rng(5678);
  for (int k : {-2, 1, 3}) {
    const ModelPtr scaled = falsar::scale_output(car, "speed", k);
    const auto scaled_spec = falsar::scale_formula(spec, "speed", k);
    const auto scaled_pure = falsar::scale_formula(pure, "speed", k);
    for (int t = 0; t < 20; ++t) {
      const Signal u = random_input(rng, *car, 201);
      const Signal w0 = car->simulate(u);
      const Signal w1 = scaled->simulate(u);
      const double r0 = stl::eval_robust(*spec, w0);
      const double r1 = stl::eval_robust(*scaled_spec, w1);
      CHECK((r1 > 0.0) == (r0 > 0.0));
      CHECK((r1 < 0.0) == (r0 < 0.0));
      const double p0 = stl::eval_robust(*pure, w0);
      const double p1 = stl::eval_robust(*scaled_pure, w1);
      CHECK(p1 / falsar::scale_pow10(p0, k) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("derived delta channel: hand-checked lookahead differences") {
  const auto base = std::make_shared<PlaybackMock>(
      std::vector<double>{0.0, 1.0, 3.0, 6.0});
  const ModelPtr m = falsar::with_derived_delta(base, "x", 2.0);
  CHECK(m->outputs() == std::vector<std::string>{"x", "delta_2_x"});
  const Signal u = Signal::constant({"u"}, 1.0, 4, std::vector<double>{0.0});
  const Signal w = m->simulate(u);
  CHECK(w.column(0) == std::vector<double>{0.0, 1.0, 3.0, 6.0});
  CHECK(w.column(1) == std::vector<double>{3.0, 5.0, 0.0, 0.0});

  // A constant output has zero differences everywhere.
  const auto flat = std::make_shared<PlaybackMock>(
      std::vector<double>{4.0, 4.0, 4.0, 4.0});
  const Signal wf =
      falsar::with_derived_delta(flat, "x", 1.0)->simulate(u);
  CHECK(wf.column(1) == std::vector<double>{0.0, 0.0, 0.0, 0.0});

  CHECK_THROWS_AS(falsar::with_derived_delta(base, "x", 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(falsar::with_derived_delta(base, "x", 0.7),
                  std::invalid_argument);
  CHECK_THROWS_AS(falsar::with_derived_delta(base, "x", 9.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(falsar::with_derived_delta(base, "y", 1.0),
                  std::invalid_argument);
}

TEST_CASE("delta channel feeds rate-bound specs on the car") {
  const ModelPtr m =
      falsar::with_derived_delta(falsar::load_model("car"), "speed", 4.0);
  const Signal w = m->simulate(constant_input(*m, full_rows(*m), {100.0, 0.0}));
  REQUIRE(w.has_channel("delta_4_speed"));
  // Peak acceleration is bounded, so a 4 s speed gain stays under 40.
  CHECK(stl::eval_robust(*stl::parse("alw_[0,26](delta_4_speed < 40)"), w) >
        0.0);
}

TEST_CASE("model registry: names and parameter validation") {
  CHECK(falsar::load_model("car")->name() == "car");
  CHECK(falsar::load_model("fuel")->name() == "fuel");
  CHECK(falsar::load_model("synthetic")->name() == "synthetic");
  CHECK_THROWS_AS(falsar::load_model("quadrotor"), std::invalid_argument);
  CHECK_THROWS_AS(falsar::load_model("car", {{"mag1", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(falsar::load_model("synthetic", {{"magX", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(falsar::load_model("synthetic", {{"mag1", -1.0}}),
                  std::invalid_argument);
}

TEST_CASE("synthetic: output magnitudes follow the configured scales") {
  const ModelPtr unit = falsar::load_model("synthetic");
  const ModelPtr big =
      falsar::load_model("synthetic", {{"mag1", 1.0}, {"mag2", 1000.0}});
  Rng rng(31);
  const Signal u = random_input(rng, *unit, 101);
  const Signal w0 = unit->simulate(u);
  const Signal w1 = big->simulate(u);
  for (std::size_t j = 0; j < w0.rows(); ++j) {
    CHECK(w1.at(j, 0) == w0.at(j, 0));  // y1 untouched by mag2
    if (w0.at(j, 1) != 0.0) {
      CHECK(w1.at(j, 1) / w0.at(j, 1) == doctest::Approx(1000.0));
    }
  }
}

TEST_CASE("fuel: friction estimate stays nonnegative, mode is binary") {
  const ModelPtr fuel = falsar::load_model("fuel");
  Rng rng(62);
  for (int k = 0; k < 10; ++k) {
    const Signal w = fuel->simulate(random_input(rng, *fuel, 201));
    for (std::size_t j = 0; j < w.rows(); ++j) {
      CHECK(w.at(j, 0) >= 0.0);
      CHECK((w.at(j, 1) == 0.0 || w.at(j, 1) == 1.0));
    }
  }
}
