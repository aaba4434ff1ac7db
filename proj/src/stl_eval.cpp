#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "falsar/kernels.hpp"
#include "falsar/stl.hpp"

namespace falsar::stl {

namespace {

// Expression value over all grid points, with constants kept scalar so
// that e.g. "2 * x + 3" costs two kernel passes, not a fill.
struct ExprVal {
  bool is_const = false;
  double c = 0.0;
  std::vector<double> v;
};

ExprVal eval_expr(const Expr& e, const Signal& w) {
  const kernels::Ops& K = kernels::active();
  switch (e.kind) {
    case Expr::Kind::Const:
      return {true, e.value, {}};
    case Expr::Kind::Channel:
      return {false, 0.0, w.column(w.channel_index(e.channel))};
    case Expr::Kind::Abs: {
      ExprVal x = eval_expr(*e.lhs, w);
      if (x.is_const) return {true, std::fabs(x.c), {}};
      K.abs(x.v.data(), x.v.data(), x.v.size());
      return x;
    }
    default:
      break;
  }

  ExprVal a = eval_expr(*e.lhs, w);
  ExprVal b = eval_expr(*e.rhs, w);
  if (a.is_const && b.is_const) {
    switch (e.kind) {
      case Expr::Kind::Add:
        return {true, a.c + b.c, {}};
      case Expr::Kind::Sub:
        return {true, a.c - b.c, {}};
      default:
        return {true, a.c * b.c, {}};
    }
  }
  // One side may still be scalar; write into the vector side in place.
  std::vector<double> out =
      a.is_const ? std::move(b.v) : std::move(a.v);
  const std::size_t n = out.size();
  switch (e.kind) {
    case Expr::Kind::Add:
      if (a.is_const)
        K.add_s(out.data(), a.c, out.data(), n);
      else if (b.is_const)
        K.add_s(out.data(), b.c, out.data(), n);
      else
        K.add(out.data(), b.v.data(), out.data(), n);
      break;
    case Expr::Kind::Sub:
      if (a.is_const)
        K.rsub_s(out.data(), a.c, out.data(), n);
      else if (b.is_const)
        K.sub_s(out.data(), b.c, out.data(), n);
      else
        K.sub(out.data(), b.v.data(), out.data(), n);
      break;
    default:
      if (a.is_const)
        K.mul_s(out.data(), a.c, out.data(), n);
      else if (b.is_const)
        K.mul_s(out.data(), b.c, out.data(), n);
      else
        K.mul(out.data(), b.v.data(), out.data(), n);
      break;
  }
  return {false, 0.0, std::move(out)};
}

std::vector<double> atom_margin(const Expr& e, const Signal& w) {
  ExprVal x = eval_expr(e, w);
  if (x.is_const) return std::vector<double>(w.rows(), x.c);
  return std::move(x.v);
}

// Sliding min over r[j+lo .. min(j+hi, n-1)] for every j, +inf where the
// window falls past the end. Monotone deque, O(n) overall.
std::vector<double> windowed_min(const std::vector<double>& r, std::size_t lo,
                                 std::size_t hi) {
  const std::size_t n = r.size();
  std::vector<double> out(n, kInf);
  std::deque<std::size_t> q;
  std::size_t next = lo;
  for (std::size_t j = 0; j < n; ++j) {
    if (j + lo > n - 1) break;
    const std::size_t end = std::min(j + hi, n - 1);
    while (next <= end) {
      while (!q.empty() && r[q.back()] >= r[next]) q.pop_back();
      q.push_back(next);
      ++next;
    }
    while (q.front() < j + lo) q.pop_front();
    out[j] = r[q.front()];
  }
  return out;
}

std::vector<double> windowed_max(const std::vector<double>& r, std::size_t lo,
                                 std::size_t hi) {
  const std::size_t n = r.size();
  std::vector<double> out(n, -kInf);
  std::deque<std::size_t> q;
  std::size_t next = lo;
  for (std::size_t j = 0; j < n; ++j) {
    if (j + lo > n - 1) break;
    const std::size_t end = std::min(j + hi, n - 1);
    while (next <= end) {
      while (!q.empty() && r[q.back()] <= r[next]) q.pop_back();
      q.push_back(next);
      ++next;
    }
    while (q.front() < j + lo) q.pop_front();
    out[j] = r[q.front()];
  }
  return out;
}

// out[j] = sup over offsets i in [lo,hi] (within range) of
//   min(rg[j+i], inf of rf over [j, j+i)). The inner inf excludes the
// witness instant itself, so acc is folded after the candidate.
std::vector<double> until_eval(const std::vector<double>& rf,
                               const std::vector<double>& rg, std::size_t lo,
                               std::size_t hi) {
  const std::size_t n = rf.size();
  std::vector<double> out(n, -kInf);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = kInf;
    double best = -kInf;
    const std::size_t end = std::min(j + hi, n - 1);
    for (std::size_t t = j; t <= end; ++t) {
      if (t - j >= lo) best = std::max(best, std::min(rg[t], acc));
      acc = std::min(acc, rf[t]);
    }
    out[j] = best;
  }
  return out;
}

// Boolean satisfaction per suffix; mirrors the quantitative recursion
// but honors strict vs non-strict atoms.
std::vector<char> bool_signal(const Formula& f, const Signal& w) {
  const std::size_t n = w.rows();
  switch (f.kind) {
    case Formula::Kind::Atom: {
      std::vector<double> m = atom_margin(*f.margin, w);
      std::vector<char> out(n);
      for (std::size_t j = 0; j < n; ++j)
        out[j] = f.strict ? m[j] > 0.0 : m[j] >= 0.0;
      return out;
    }
    case Formula::Kind::False:
      return std::vector<char>(n, 0);
    case Formula::Kind::Not: {
      std::vector<char> a = bool_signal(*f.a, w);
      for (auto& x : a) x = !x;
      return a;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<char> a = bool_signal(*f.a, w);
      std::vector<char> b = bool_signal(*f.b, w);
      for (std::size_t j = 0; j < n; ++j)
        a[j] = f.kind == Formula::Kind::And ? (a[j] && b[j]) : (a[j] || b[j]);
      return a;
    }
    default:
      break;
  }

  const IndexWindow iw = interval_to_indices(f.interval, w.step(), n);
  if (f.kind == Formula::Kind::Until) {
    std::vector<char> sa = bool_signal(*f.a, w);
    std::vector<char> sb = bool_signal(*f.b, w);
    std::vector<char> out(n, 0);
    if (iw.empty) return out;
    for (std::size_t j = 0; j < n; ++j) {
      bool hold = true;
      const std::size_t end = std::min(j + iw.hi, n - 1);
      for (std::size_t t = j; t <= end; ++t) {
        if (t - j >= iw.lo && sb[t] && hold) {
          out[j] = 1;
          break;
        }
        hold = hold && sa[t];
      }
    }
    return out;
  }

  const bool is_alw = f.kind == Formula::Kind::Always;
  std::vector<char> sa = bool_signal(*f.a, w);
  std::vector<char> out(n, is_alw ? 1 : 0);
  if (iw.empty) return out;
  for (std::size_t j = 0; j < n; ++j) {
    if (j + iw.lo > n - 1) continue;  // empty window: alw true, ev false
    const std::size_t end = std::min(j + iw.hi, n - 1);
    bool all = true, any = false;
    for (std::size_t t = j + iw.lo; t <= end; ++t) {
      all = all && sa[t];
      any = any || sa[t];
    }
    out[j] = is_alw ? all : any;
  }
  return out;
}

}  // namespace

IndexWindow interval_to_indices(const Interval& iv, double step,
                                std::size_t rows) {
  constexpr double tol = 1e-9;
  IndexWindow out;
  const double lo_real = std::ceil(iv.lo / step - tol);
  const std::size_t lo =
      lo_real <= 0.0 ? 0 : static_cast<std::size_t>(lo_real);
  std::size_t hi = rows - 1;
  if (iv.hi != kInf) {
    const double hi_real = std::floor(iv.hi / step + tol);
    if (hi_real < 0.0) {
      out.empty = true;
      return out;
    }
    hi = std::min(hi, static_cast<std::size_t>(hi_real));
  }
  if (lo > hi) {
    out.empty = true;
    return out;
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

std::vector<double> robustness_signal(const Formula& f, const Signal& w) {
  const std::size_t n = w.rows();
  const kernels::Ops& K = kernels::active();
  switch (f.kind) {
    case Formula::Kind::Atom:
      return atom_margin(*f.margin, w);
    case Formula::Kind::False:
      return std::vector<double>(n, -kInf);
    case Formula::Kind::Not: {
      std::vector<double> a = robustness_signal(*f.a, w);
      K.neg(a.data(), a.data(), n);
      return a;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<double> a = robustness_signal(*f.a, w);
      std::vector<double> b = robustness_signal(*f.b, w);
      if (f.kind == Formula::Kind::And)
        K.min(a.data(), b.data(), a.data(), n);
      else
        K.max(a.data(), b.data(), a.data(), n);
      return a;
    }
    case Formula::Kind::Until: {
      std::vector<double> a = robustness_signal(*f.a, w);
      std::vector<double> b = robustness_signal(*f.b, w);
      const IndexWindow iw = interval_to_indices(f.interval, w.step(), n);
      if (iw.empty) return std::vector<double>(n, -kInf);
      return until_eval(a, b, iw.lo, iw.hi);
    }
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: {
      std::vector<double> a = robustness_signal(*f.a, w);
      const IndexWindow iw = interval_to_indices(f.interval, w.step(), n);
      if (f.kind == Formula::Kind::Always) {
        if (iw.empty) return std::vector<double>(n, kInf);
        return windowed_min(a, iw.lo, iw.hi);
      }
      if (iw.empty) return std::vector<double>(n, -kInf);
      return windowed_max(a, iw.lo, iw.hi);
    }
  }
  throw std::logic_error("robustness_signal: bad formula node");
}

double eval_robust(const Formula& f, const Signal& w) {
  return robustness_signal(f, w)[0];
}

bool eval_boolean(const Formula& f, const Signal& w) {
  return bool_signal(f, w)[0] != 0;
}

double eval_robust_restricted(const Formula& f, const Signal& w,
                              const TimeSet& S) {
  if (S.member.size() != w.rows())
    throw std::invalid_argument(
        "eval_robust_restricted: time set size does not match signal");
  const std::vector<double> r = robustness_signal(f, w);
  double m = kInf;
  for (std::size_t j = 0; j < r.size(); ++j)
    if (S.member[j]) m = std::min(m, r[j]);
  return m;
}

TimeSet falsified_time_set(const Formula& f, const Signal& w,
                           const Interval& window) {
  const std::vector<double> r = robustness_signal(f, w);
  TimeSet S;
  S.member.assign(w.rows(), false);
  const IndexWindow iw = interval_to_indices(window, w.step(), w.rows());
  if (iw.empty) return S;
  for (std::size_t j = iw.lo; j <= iw.hi; ++j) S.member[j] = r[j] < 0.0;
  return S;
}

}  // namespace falsar::stl
