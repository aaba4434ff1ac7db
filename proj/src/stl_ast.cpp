#include "falsar/stl_ast.hpp"

#include <cstdio>
#include <utility>

namespace falsar::stl {

namespace {

ExprPtr expr_node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

FormulaPtr node(Formula f) {
  return std::make_shared<const Formula>(std::move(f));
}

std::string number_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ExprPtr expr_const(double v) {
  Expr e;
  e.kind = Expr::Kind::Const;
  e.value = v;
  return expr_node(std::move(e));
}

ExprPtr expr_channel(std::string name) {
  Expr e;
  e.kind = Expr::Kind::Channel;
  e.channel = std::move(name);
  return expr_node(std::move(e));
}

static ExprPtr expr_binary(Expr::Kind k, ExprPtr l, ExprPtr r) {
  Expr e;
  e.kind = k;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return expr_node(std::move(e));
}

ExprPtr expr_add(ExprPtr l, ExprPtr r) {
  return expr_binary(Expr::Kind::Add, std::move(l), std::move(r));
}
ExprPtr expr_sub(ExprPtr l, ExprPtr r) {
  return expr_binary(Expr::Kind::Sub, std::move(l), std::move(r));
}
ExprPtr expr_mul(ExprPtr l, ExprPtr r) {
  return expr_binary(Expr::Kind::Mul, std::move(l), std::move(r));
}
ExprPtr expr_abs(ExprPtr e) {
  Expr n;
  n.kind = Expr::Kind::Abs;
  n.lhs = std::move(e);
  return expr_node(std::move(n));
}

// a - b, except that subtracting the literal 0 is dropped so that the
// canonical "(margin > 0)" text form round-trips through the parser.
static ExprPtr margin_sub(ExprPtr a, ExprPtr b) {
  if (b->kind == Expr::Kind::Const && b->value == 0.0) return a;
  return expr_sub(std::move(a), std::move(b));
}

FormulaPtr make_atom(ExprPtr lhs, Rel rel, ExprPtr rhs) {
  Formula f;
  f.kind = Formula::Kind::Atom;
  switch (rel) {
    case Rel::Gt:
    case Rel::Ge:
      f.margin = margin_sub(std::move(lhs), std::move(rhs));
      f.strict = rel == Rel::Gt;
      break;
    case Rel::Lt:
    case Rel::Le:
      f.margin = margin_sub(std::move(rhs), std::move(lhs));
      f.strict = rel == Rel::Lt;
      break;
  }
  return node(std::move(f));
}

FormulaPtr make_eq(ExprPtr lhs, ExprPtr rhs) {
  ExprPtr half = expr_const(0.5);
  FormulaPtr above = make_atom(lhs, Rel::Gt, expr_sub(rhs, half));
  FormulaPtr below = make_atom(std::move(lhs), Rel::Lt,
                               expr_add(std::move(rhs), std::move(half)));
  return make_and(std::move(above), std::move(below));
}

FormulaPtr make_false() {
  Formula f;
  f.kind = Formula::Kind::False;
  return node(std::move(f));
}

FormulaPtr make_true() { return make_not(make_false()); }

FormulaPtr make_not(FormulaPtr f) {
  Formula n;
  n.kind = Formula::Kind::Not;
  n.a = std::move(f);
  return node(std::move(n));
}

static FormulaPtr binary(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = k;
  f.a = std::move(a);
  f.b = std::move(b);
  return node(std::move(f));
}

FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  return binary(Formula::Kind::And, std::move(a), std::move(b));
}
FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  return binary(Formula::Kind::Or, std::move(a), std::move(b));
}
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b) {
  return make_or(make_not(std::move(a)), std::move(b));
}

FormulaPtr make_until(Interval i, FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Formula::Kind::Until;
  f.interval = i;
  f.a = std::move(a);
  f.b = std::move(b);
  return node(std::move(f));
}

static FormulaPtr unary_temporal(Formula::Kind k, Interval i, FormulaPtr f) {
  Formula n;
  n.kind = k;
  n.interval = i;
  n.a = std::move(f);
  return node(std::move(n));
}

FormulaPtr make_always(Interval i, FormulaPtr f) {
  return unary_temporal(Formula::Kind::Always, i, std::move(f));
}
FormulaPtr make_eventually(Interval i, FormulaPtr f) {
  return unary_temporal(Formula::Kind::Eventually, i, std::move(f));
}

bool equals(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Const:
      return x.value == y.value;
    case Expr::Kind::Channel:
      return x.channel == y.channel;
    case Expr::Kind::Abs:
      return equals(*x.lhs, *y.lhs);
    default:
      return equals(*x.lhs, *y.lhs) && equals(*x.rhs, *y.rhs);
  }
}

bool equals(const Formula& x, const Formula& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Formula::Kind::Atom:
      return x.strict == y.strict && equals(*x.margin, *y.margin);
    case Formula::Kind::False:
      return true;
    case Formula::Kind::Not:
      return equals(*x.a, *y.a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return equals(*x.a, *y.a) && equals(*x.b, *y.b);
    case Formula::Kind::Until:
      return x.interval.lo == y.interval.lo && x.interval.hi == y.interval.hi &&
             equals(*x.a, *y.a) && equals(*x.b, *y.b);
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      return x.interval.lo == y.interval.lo && x.interval.hi == y.interval.hi &&
             equals(*x.a, *y.a);
  }
  return false;
}

void collect_channels(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return;
    case Expr::Kind::Channel:
      out.insert(e.channel);
      return;
    case Expr::Kind::Abs:
      collect_channels(*e.lhs, out);
      return;
    default:
      collect_channels(*e.lhs, out);
      collect_channels(*e.rhs, out);
      return;
  }
}

static void collect_channels_rec(const Formula& f, std::set<std::string>& out) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      collect_channels(*f.margin, out);
      return;
    case Formula::Kind::False:
      return;
    case Formula::Kind::Not:
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      collect_channels_rec(*f.a, out);
      return;
    default:
      collect_channels_rec(*f.a, out);
      collect_channels_rec(*f.b, out);
      return;
  }
}

std::set<std::string> collect_channels(const Formula& f) {
  std::set<std::string> out;
  collect_channels_rec(f, out);
  return out;
}

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return number_text(e.value);
    case Expr::Kind::Channel:
      return e.channel;
    case Expr::Kind::Abs:
      return "abs(" + to_string(*e.lhs) + ")";
    case Expr::Kind::Add:
      return "(" + to_string(*e.lhs) + " + " + to_string(*e.rhs) + ")";
    case Expr::Kind::Sub:
      return "(" + to_string(*e.lhs) + " - " + to_string(*e.rhs) + ")";
    case Expr::Kind::Mul:
      return "(" + to_string(*e.lhs) + " * " + to_string(*e.rhs) + ")";
  }
  return "?";
}

static std::string interval_text(const Interval& i) {
  std::string hi = i.hi == kInf ? "inf" : number_text(i.hi);
  return "_[" + number_text(i.lo) + "," + hi + "]";
}

std::string to_string(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return "(" + to_string(*f.margin) + (f.strict ? " > 0)" : " >= 0)");
    case Formula::Kind::False:
      return "false";
    case Formula::Kind::Not:
      return "not " + to_string(*f.a);
    case Formula::Kind::And:
      return "(" + to_string(*f.a) + " and " + to_string(*f.b) + ")";
    case Formula::Kind::Or:
      return "(" + to_string(*f.a) + " or " + to_string(*f.b) + ")";
    case Formula::Kind::Until:
      return "(" + to_string(*f.a) + " until" + interval_text(f.interval) +
             " " + to_string(*f.b) + ")";
    case Formula::Kind::Always:
      return "alw" + interval_text(f.interval) + " " + to_string(*f.a);
    case Formula::Kind::Eventually:
      return "ev" + interval_text(f.interval) + " " + to_string(*f.a);
  }
  return "?";
}

}  // namespace falsar::stl
