#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "falsar/signal.hpp"
#include "falsar/stl_ast.hpp"

namespace falsar {

struct InputChannel {
  std::string name;
  double lo;
  double hi;
};

// A deterministic black-box system: input trace in, output trace out on
// the same grid. Implementations must be causal (the output up to time t
// never depends on inputs after t) and pure, so concurrent simulate
// calls on one instance are safe.
class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual const std::string& name() const = 0;
  virtual const std::vector<InputChannel>& inputs() const = 0;
  virtual const std::vector<std::string>& outputs() const = 0;
  // Default benchmark horizon; simulate accepts any grid-aligned length.
  virtual double horizon() const = 0;
  virtual double step() const = 0;

  // Input channels/step must match the declaration and every sample must
  // lie in its declared range (out-of-range is rejected, not clamped).
  virtual Signal simulate(const Signal& input) const = 0;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

// True iff extending the input leaves the earlier output unchanged:
// simulate(concat(u, u2)) restricted to u's span matches simulate(u)
// within tol per sample.
bool check_causality(const SystemModel& m, const Signal& u, const Signal& u2,
                     double tol);

// x * 10^k with the negative powers applied as division, so that scaling
// down then comparing against scaled-up constants stays exact for the
// decimally-representable values used in specs.
double scale_pow10(double x, int k);

// Wrapper multiplying one output channel by 10^k, leaving the rest
// untouched. Unknown channel -> error.
ModelPtr scale_output(ModelPtr m, const std::string& channel, int k);

// Companion rewrite: multiplies by 10^k every constant term compared
// against `channel` (through +, -, abs, and constant coefficients), so
// (scale_output(m), scale_formula(f)) is falsified by exactly the same
// inputs as (m, f). Atoms mixing `channel` with other channels are not
// scalable -> error.
stl::FormulaPtr scale_formula(const stl::FormulaPtr& f,
                              const std::string& channel, int k);

// Wrapper adding output channel "delta_<tau>_<channel>" carrying
// x(t+tau) - x(t) for t <= T-tau and 0 beyond. tau must be grid-aligned
// and in (0, T]. The derived channel looks ahead, so it is a monitoring
// aid and intentionally exempt from the causality property.
ModelPtr with_derived_delta(ModelPtr m, const std::string& channel,
                            double tau);

// Built-in surrogate registry: "car" (throttle/brake -> speed, rpm,
// gear), "fuel" (pedal/engine -> mu, mode), "synthetic" (u1,u2 -> y1,y2
// with configurable magnitudes mag1, mag2). Unknown names and unknown
// parameter keys -> error.
ModelPtr load_model(const std::string& name,
                    const std::map<std::string, double>& params = {});

}  // namespace falsar
