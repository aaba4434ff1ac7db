#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "falsar/signal.hpp"
#include "falsar/stl_ast.hpp"

namespace falsar::stl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t col)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

// Text form, e.g. "alw_[0,30](speed < 120)". Operators by loosening
// precedence: not/alw_I/ev_I, until_I, and, or, ->. Intervals are
// "_[a,b]" with a < b; b may be "inf". "ch == c" desugars to the unit
// band (ch > c - 0.5) and (ch < c + 0.5); "p -> q" to (not p) or q.
FormulaPtr parse(const std::string& text);

// Quantitative satisfaction margin of f on w (evaluated at time 0).
// Positive means satisfied with room to spare, negative falsified;
// +/-inf when an empty temporal window decides the value.
double eval_robust(const Formula& f, const Signal& w);

// Boolean satisfaction; strict vs non-strict atoms differ only here.
bool eval_boolean(const Formula& f, const Signal& w);

// Robustness of f on every suffix of w: out[j] is eval_robust on the
// signal starting at sample j. Shared workhorse of the functions above.
std::vector<double> robustness_signal(const Formula& f, const Signal& w);

// min over the suffixes selected by S of eval_robust(f, suffix); +inf
// when S is empty. S must have one entry per sample of w.
double eval_robust_restricted(const Formula& f, const Signal& w,
                              const TimeSet& S);

// Grid instants inside window (intersected with the signal's extent)
// where f's suffix robustness is negative. Feeding the result of one
// conjunct into eval_robust_restricted of the other bounds the
// robustness of alw_window(f or g) from above.
TimeSet falsified_time_set(const Formula& f, const Signal& w,
                           const Interval& window);

// Index range [lo_idx, hi_idx] of grid offsets covered by iv on a grid
// with the given step and sample count; empty when lo_idx > hi_idx.
struct IndexWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool empty = false;
};
IndexWindow interval_to_indices(const Interval& iv, double step,
                                std::size_t rows);

}  // namespace falsar::stl
