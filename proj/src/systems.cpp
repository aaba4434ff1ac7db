#include "falsar/systems.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace falsar {

namespace {

void validate_input(const SystemModel& m, const Signal& u) {
  const auto& ins = m.inputs();
  if (u.cols() != ins.size())
    throw std::invalid_argument("simulate: input has " +
                                std::to_string(u.cols()) + " channels, " +
                                m.name() + " expects " +
                                std::to_string(ins.size()));
  for (std::size_t i = 0; i < ins.size(); ++i)
    if (u.channels()[i] != ins[i].name)
      throw std::invalid_argument("simulate: input channel '" +
                                  u.channels()[i] + "' where " + m.name() +
                                  " expects '" + ins[i].name + "'");
  if (std::fabs(u.step() - m.step()) > 1e-12)
    throw std::invalid_argument("simulate: input step does not match " +
                                m.name());
  for (std::size_t j = 0; j < u.rows(); ++j)
    for (std::size_t i = 0; i < ins.size(); ++i) {
      const double x = u.at(j, i);
      if (x < ins[i].lo || x > ins[i].hi)
        throw std::domain_error(
            "simulate: " + ins[i].name + " = " + std::to_string(x) +
            " at sample " + std::to_string(j) + " outside [" +
            std::to_string(ins[i].lo) + ", " + std::to_string(ins[i].hi) +
            "]");
    }
}

// Longitudinal car with a four-speed automatic gearbox. Surrogate
// dynamics (coefficients are ours): acceleration scales with the gear
// ratio and throttle, braking and linear drag oppose it; the gearbox
// tracks a speed-derived target gear one step per 0.6 s. Gear lag is
// what makes the gear/speed safety templates falsifiable.
class CarModel final : public SystemModel {
 public:
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return inputs_; }
  const std::vector<std::string>& outputs() const override { return outputs_; }
  double horizon() const override { return 30.0; }
  double step() const override { return 0.05; }

  Signal simulate(const Signal& u) const override {
    validate_input(*this, u);
    static constexpr double kRatio[4] = {3.5, 2.2, 1.5, 1.0};
    static constexpr double kRpmPerSpeed[4] = {260.0, 130.0, 80.0, 24.0};
    static constexpr double kA0 = 1.6;        // m/s^2 per ratio at full throttle
    static constexpr double kBrake = 6.0;     // m/s^2 at full brake
    static constexpr double kDrag = 0.0095;   // 1/s
    static constexpr double kShiftDelay = 0.6;

    const std::size_t n = u.rows();
    const double h = step();
    std::vector<double> out;
    out.reserve(n * 3);
    double v = 0.0, timer = 0.0;
    int gear = 1;
    for (std::size_t j = 0; j < n; ++j) {
      out.push_back(v);
      out.push_back(900.0 + v * kRpmPerSpeed[gear - 1]);
      out.push_back(static_cast<double>(gear));

      const int target = v < 10.0 ? 1 : v < 20.0 ? 2 : v < 26.0 ? 3 : 4;
      if (target == gear) {
        timer = 0.0;
      } else {
        timer += h;
        if (timer >= kShiftDelay - 1e-9) {
          gear += target > gear ? 1 : -1;
          timer = 0.0;
        }
      }
      const double a = kA0 * kRatio[gear - 1] * (u.at(j, 0) / 100.0) -
                       kBrake * (u.at(j, 1) / 325.0) - kDrag * v;
      v = std::max(0.0, v + h * a);
    }
    return Signal(outputs_, h, std::move(out));
  }

 private:
  std::string name_ = "car";
  std::vector<InputChannel> inputs_ = {{"throttle", 0.0, 100.0},
                                       {"brake", 0.0, 325.0}};
  std::vector<std::string> outputs_ = {"speed", "rpm", "gear"};
};

// Air-fuel controller surrogate: mu is a normalized deviation that
// spikes when the pedal moves faster than a first-order lag can track,
// scaled mildly by engine speed; mode flags power demand.
class FuelModel final : public SystemModel {
 public:
  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return inputs_; }
  const std::vector<std::string>& outputs() const override { return outputs_; }
  double horizon() const override { return 50.0; }
  double step() const override { return 0.05; }

  Signal simulate(const Signal& u) const override {
    validate_input(*this, u);
    static constexpr double kTau = 1.5;      // pedal-tracking lag, s
    static constexpr double kGain = 0.0033;  // deviation per pedal unit

    const std::size_t n = u.rows();
    const double h = step();
    std::vector<double> out;
    out.reserve(n * 2);
    double lag = u.at(0, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const double pedal = u.at(j, 0);
      const double engine = u.at(j, 1);
      out.push_back(kGain * std::fabs(pedal - lag) * (engine / 1000.0));
      out.push_back(pedal >= 50.0 ? 1.0 : 0.0);
      lag += h * (pedal - lag) / kTau;
    }
    return Signal(outputs_, h, std::move(out));
  }

 private:
  std::string name_ = "fuel";
  std::vector<InputChannel> inputs_ = {{"pedal", 8.8, 90.0},
                                       {"engine", 900.0, 1100.0}};
  std::vector<std::string> outputs_ = {"mu", "mode"};
};

// Controlled robustness landscape for scale-problem studies. Outputs are
// built so that rob(y_i < 0.5*mag_i) equals margin_i:
//   margin1 >= 0.3*mag1 everywhere (unfalsifiable), with a shallow decoy
//     gradient toward the far corner p1;
//   margin2 = mag2*(|u - p2|^2 - r^2) dips below zero only inside a
//     small ball at p2 (r = 0.0158), on the opposite side of the box, with
//     a smooth slope toward it everywhere.
// With mag2 >> mag1 the min-superposition of the two hides margin2's
// gradient from a single-objective search almost everywhere, while a
// search on margin2 alone walks straight into the ball.
class SyntheticModel final : public SystemModel {
 public:
  SyntheticModel(double mag1, double mag2) : mag1_(mag1), mag2_(mag2) {
    if (!(mag1 > 0.0) || !(mag2 > 0.0))
      throw std::invalid_argument("synthetic: magnitudes must be positive");
  }

  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override { return inputs_; }
  const std::vector<std::string>& outputs() const override { return outputs_; }
  double horizon() const override { return 10.0; }
  double step() const override { return 0.1; }

  Signal simulate(const Signal& u) const override {
    validate_input(*this, u);
    static constexpr double kP1 = 0.9, kP2 = 0.15, kBallSq = 0.00025;

    const std::size_t n = u.rows();
    std::vector<double> out;
    out.reserve(n * 2);
    for (std::size_t j = 0; j < n; ++j) {
      const double u1 = u.at(j, 0), u2 = u.at(j, 1);
      const double d1 = (u1 - kP1) * (u1 - kP1) + (u2 - kP1) * (u2 - kP1);
      const double d2 = (u1 - kP2) * (u1 - kP2) + (u2 - kP2) * (u2 - kP2);
      const double margin1 = mag1_ * (0.3 + 0.2 * d1);
      const double margin2 = mag2_ * (d2 - kBallSq);
      out.push_back(0.5 * mag1_ - margin1);
      out.push_back(0.5 * mag2_ - margin2);
    }
    return Signal(outputs_, step(), std::move(out));
  }

 private:
  double mag1_, mag2_;
  std::string name_ = "synthetic";
  std::vector<InputChannel> inputs_ = {{"u1", 0.0, 1.0}, {"u2", 0.0, 1.0}};
  std::vector<std::string> outputs_ = {"y1", "y2"};
};

class ScaledModel final : public SystemModel {
 public:
  ScaledModel(ModelPtr inner, std::string channel, int k)
      : inner_(std::move(inner)), channel_(std::move(channel)), k_(k) {
    const auto& outs = inner_->outputs();
    for (col_ = 0; col_ < outs.size(); ++col_)
      if (outs[col_] == channel_) break;
    if (col_ == outs.size())
      throw std::invalid_argument("scale_output: " + inner_->name() +
                                  " has no output '" + channel_ + "'");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "[%s*10^%d]", channel_.c_str(), k_);
    name_ = inner_->name() + buf;
  }

  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override {
    return inner_->inputs();
  }
  const std::vector<std::string>& outputs() const override {
    return inner_->outputs();
  }
  double horizon() const override { return inner_->horizon(); }
  double step() const override { return inner_->step(); }

  Signal simulate(const Signal& u) const override {
    const Signal w = inner_->simulate(u);
    std::vector<double> data = w.data();
    const std::size_t cols = w.cols();
    for (std::size_t j = 0; j < w.rows(); ++j)
      data[j * cols + col_] = scale_pow10(data[j * cols + col_], k_);
    return Signal(w.channels(), w.step(), std::move(data));
  }

 private:
  ModelPtr inner_;
  std::string channel_;
  int k_;
  std::size_t col_;
  std::string name_;
};

class DeltaModel final : public SystemModel {
 public:
  DeltaModel(ModelPtr inner, std::string channel, double tau)
      : inner_(std::move(inner)), channel_(std::move(channel)) {
    const auto& outs = inner_->outputs();
    for (col_ = 0; col_ < outs.size(); ++col_)
      if (outs[col_] == channel_) break;
    if (col_ == outs.size())
      throw std::invalid_argument("with_derived_delta: " + inner_->name() +
                                  " has no output '" + channel_ + "'");
    const double ratio = tau / inner_->step();
    const double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, std::fabs(ratio)))
      throw std::invalid_argument("with_derived_delta: tau " +
                                  std::to_string(tau) + " is off-grid");
    lead_ = static_cast<std::size_t>(rounded);
    if (lead_ == 0 || tau > inner_->horizon())
      throw std::invalid_argument(
          "with_derived_delta: tau must be in (0, horizon]");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", tau);
    outputs_ = inner_->outputs();
    outputs_.push_back("delta_" + std::string(buf) + "_" + channel_);
    name_ = inner_->name() + "[" + outputs_.back() + "]";
  }

  const std::string& name() const override { return name_; }
  const std::vector<InputChannel>& inputs() const override {
    return inner_->inputs();
  }
  const std::vector<std::string>& outputs() const override {
    return outputs_;
  }
  double horizon() const override { return inner_->horizon(); }
  double step() const override { return inner_->step(); }

  Signal simulate(const Signal& u) const override {
    const Signal w = inner_->simulate(u);
    const std::size_t n = w.rows(), cols = w.cols();
    std::vector<double> data;
    data.reserve(n * (cols + 1));
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = w.row(j);
      data.insert(data.end(), row.begin(), row.end());
      data.push_back(j + lead_ <= n - 1
                         ? w.at(j + lead_, col_) - w.at(j, col_)
                         : 0.0);
    }
    return Signal(outputs_, w.step(), std::move(data));
  }

 private:
  ModelPtr inner_;
  std::string channel_;
  std::size_t col_ = 0;
  std::size_t lead_ = 0;
  std::vector<std::string> outputs_;
  std::string name_;
};

bool expr_mentions_any(const stl::Expr& e) {
  switch (e.kind) {
    case stl::Expr::Kind::Const:
      return false;
    case stl::Expr::Kind::Channel:
      return true;
    case stl::Expr::Kind::Abs:
      return expr_mentions_any(*e.lhs);
    default:
      return expr_mentions_any(*e.lhs) || expr_mentions_any(*e.rhs);
  }
}

// Rewrites e into 10^k * e, assuming the only channel e mentions is
// `channel` (whose samples the scaled model already multiplies by 10^k).
stl::ExprPtr scale_expr(const stl::ExprPtr& e, const std::string& channel,
                        int k) {
  using stl::Expr;
  switch (e->kind) {
    case Expr::Kind::Const:
      return stl::expr_const(scale_pow10(e->value, k));
    case Expr::Kind::Channel:
      if (e->channel != channel)
        throw std::invalid_argument(
            "scale_formula: atom mixes '" + channel + "' with '" +
            e->channel + "'; such atoms cannot be rescaled");
      return e;
    case Expr::Kind::Add:
      return stl::expr_add(scale_expr(e->lhs, channel, k),
                           scale_expr(e->rhs, channel, k));
    case Expr::Kind::Sub:
      return stl::expr_sub(scale_expr(e->lhs, channel, k),
                           scale_expr(e->rhs, channel, k));
    case Expr::Kind::Abs:
      return stl::expr_abs(scale_expr(e->lhs, channel, k));
    case Expr::Kind::Mul: {
      const bool lm = expr_mentions_any(*e->lhs);
      const bool rm = expr_mentions_any(*e->rhs);
      if (lm && rm)
        throw std::invalid_argument(
            "scale_formula: cannot rescale a product of channel values");
      if (rm) return stl::expr_mul(e->lhs, scale_expr(e->rhs, channel, k));
      return stl::expr_mul(scale_expr(e->lhs, channel, k), e->rhs);
    }
  }
  throw std::logic_error("scale_expr: bad expression node");
}

stl::FormulaPtr scale_formula_rec(const stl::FormulaPtr& f,
                                  const std::string& channel, int k) {
  using stl::Formula;
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::set<std::string> chans;
      stl::collect_channels(*f->margin, chans);
      if (!chans.count(channel)) return f;
      Formula out = *f;
      out.margin = scale_expr(f->margin, channel, k);
      return std::make_shared<const Formula>(std::move(out));
    }
    case Formula::Kind::False:
      return f;
    case Formula::Kind::Not:
      return stl::make_not(scale_formula_rec(f->a, channel, k));
    case Formula::Kind::And:
      return stl::make_and(scale_formula_rec(f->a, channel, k),
                           scale_formula_rec(f->b, channel, k));
    case Formula::Kind::Or:
      return stl::make_or(scale_formula_rec(f->a, channel, k),
                          scale_formula_rec(f->b, channel, k));
    case Formula::Kind::Until:
      return stl::make_until(f->interval,
                             scale_formula_rec(f->a, channel, k),
                             scale_formula_rec(f->b, channel, k));
    case Formula::Kind::Always:
      return stl::make_always(f->interval,
                              scale_formula_rec(f->a, channel, k));
    case Formula::Kind::Eventually:
      return stl::make_eventually(f->interval,
                                  scale_formula_rec(f->a, channel, k));
  }
  throw std::logic_error("scale_formula: bad formula node");
}

}  // namespace

bool check_causality(const SystemModel& m, const Signal& u, const Signal& u2,
                     double tol) {
  const Signal w = m.simulate(u);
  const Signal w2 = m.simulate(concat(u, u2));
  for (std::size_t j = 0; j < w.rows(); ++j)
    for (std::size_t i = 0; i < w.cols(); ++i)
      if (std::fabs(w2.at(j, i) - w.at(j, i)) > tol) return false;
  return true;
}

double scale_pow10(double x, int k) {
  double p = 1.0;
  for (int i = k < 0 ? -k : k; i > 0; --i) p *= 10.0;
  return k >= 0 ? x * p : x / p;
}

ModelPtr scale_output(ModelPtr m, const std::string& channel, int k) {
  return std::make_shared<ScaledModel>(std::move(m), channel, k);
}

stl::FormulaPtr scale_formula(const stl::FormulaPtr& f,
                              const std::string& channel, int k) {
  return scale_formula_rec(f, channel, k);
}

ModelPtr with_derived_delta(ModelPtr m, const std::string& channel,
                            double tau) {
  return std::make_shared<DeltaModel>(std::move(m), channel, tau);
}

ModelPtr load_model(const std::string& name,
                    const std::map<std::string, double>& params) {
  if (name == "synthetic") {
    double mag1 = 1.0, mag2 = 1.0;
    for (const auto& [key, value] : params) {
      if (key == "mag1")
        mag1 = value;
      else if (key == "mag2")
        mag2 = value;
      else
        throw std::invalid_argument("synthetic: unknown parameter '" + key +
                                    "'");
    }
    return std::make_shared<SyntheticModel>(mag1, mag2);
  }
  if (!params.empty())
    throw std::invalid_argument(name + ": unknown parameter '" +
                                params.begin()->first + "'");
  if (name == "car") return std::make_shared<CarModel>();
  if (name == "fuel") return std::make_shared<FuelModel>();
  throw std::invalid_argument("unknown model '" + name +
                              "' (expected car, fuel, or synthetic)");
}

}  // namespace falsar
