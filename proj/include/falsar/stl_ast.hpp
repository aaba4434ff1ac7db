#pragma once

#include <limits>
#include <memory>
#include <set>
#include <string>

namespace falsar::stl {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed interval attached to a temporal operator; hi may be +inf.
// Non-singular by construction (lo < hi).
struct Interval {
  double lo = 0.0;
  double hi = kInf;
};

// Arithmetic expression over channel values at one sample instant.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Channel, Add, Sub, Mul, Abs };
  Kind kind;
  double value = 0.0;   // Const
  std::string channel;  // Channel
  ExprPtr lhs, rhs;     // binary ops; Abs uses lhs only
};

ExprPtr expr_const(double v);
ExprPtr expr_channel(std::string name);
ExprPtr expr_add(ExprPtr l, ExprPtr r);
ExprPtr expr_sub(ExprPtr l, ExprPtr r);
ExprPtr expr_mul(ExprPtr l, ExprPtr r);
ExprPtr expr_abs(ExprPtr e);

// Relation of the original atom. Robustness uses the same margin for the
// strict and non-strict variants; they differ only in Boolean truth at
// margin zero. Equality is desugared before reaching here.
enum class Rel { Gt, Ge, Lt, Le };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, False, Not, And, Or, Until, Always, Eventually };
  Kind kind;

  // Atom: robustness is eval(margin); Boolean truth is margin > 0, or
  // margin >= 0 when strict is false.
  ExprPtr margin;
  bool strict = true;

  Interval interval;  // Until / Always / Eventually
  FormulaPtr a, b;    // operands (b only for And / Or / Until)
};

// Atom builder; normalizes lhs REL rhs into a margin expression.
FormulaPtr make_atom(ExprPtr lhs, Rel rel, ExprPtr rhs);
// lhs == rhs over integer-valued quantities: band atom pair
// (d > -1/2) and (d < 1/2) with d = lhs - rhs, so satisfaction carries a
// positive margin instead of the flat -|d| encoding.
FormulaPtr make_eq(ExprPtr lhs, ExprPtr rhs);

FormulaPtr make_false();
FormulaPtr make_true();  // Not(False)
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
// a -> b desugars to Or(Not(a), b) immediately.
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr make_until(Interval i, FormulaPtr a, FormulaPtr b);
FormulaPtr make_always(Interval i, FormulaPtr f);
FormulaPtr make_eventually(Interval i, FormulaPtr f);

bool equals(const Formula& x, const Formula& y);
bool equals(const Expr& x, const Expr& y);

// Channel names referenced anywhere in the formula.
std::set<std::string> collect_channels(const Formula& f);
void collect_channels(const Expr& e, std::set<std::string>& out);

std::string to_string(const Formula& f);
std::string to_string(const Expr& e);

}  // namespace falsar::stl
