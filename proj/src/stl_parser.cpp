#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "falsar/stl.hpp"

namespace falsar::stl {

namespace {

enum class Tok {
  Number,
  Ident,     // channel names, keywords, and temporal heads like "alw_"
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Plus,
  Minus,
  Star,
  Arrow,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end) return out;
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, col_);
  }

  Token make(Tok kind, std::size_t len) {
    Token t{kind, text_.substr(pos_, len), 0.0, line_, col_};
    pos_ += len;
    col_ += len;
    return t;
  }

  Token next() {
    if (pos_ >= text_.size()) return Token{Tok::End, "", 0.0, line_, col_};
    char c = text_[pos_];
    char c1 = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(c1)))) {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      Token t = make(Tok::Number, static_cast<std::size_t>(end - begin));
      t.number = v;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t len = 1;
      while (pos_ + len < text_.size()) {
        char d = text_[pos_ + len];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_')
          ++len;
        else
          break;
      }
      return make(Tok::Ident, len);
    }
    switch (c) {
      case '(':
        return make(Tok::LParen, 1);
      case ')':
        return make(Tok::RParen, 1);
      case '[':
        return make(Tok::LBracket, 1);
      case ']':
        return make(Tok::RBracket, 1);
      case ',':
        return make(Tok::Comma, 1);
      case '+':
        return make(Tok::Plus, 1);
      case '*':
        return make(Tok::Star, 1);
      case '-':
        if (c1 == '>') return make(Tok::Arrow, 2);
        return make(Tok::Minus, 1);
      case '<':
        if (c1 == '=') return make(Tok::Le, 2);
        return make(Tok::Lt, 1);
      case '>':
        if (c1 == '=') return make(Tok::Ge, 2);
        return make(Tok::Gt, 1);
      case '=':
        if (c1 == '=') return make(Tok::EqEq, 2);
        fail("'=' is not an operator; use '=='");
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "not" || s == "and" || s == "or" || s == "true" ||
         s == "false" || s == "abs" || s == "inf" || s == "alw" ||
         s == "ev" || s == "until" || s == "alw_" || s == "ev_" ||
         s == "until_";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  FormulaPtr run() {
    FormulaPtr f = parse_formula();
    expect(Tok::End, "unexpected trailing input");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  bool accept_ident(const char* word) {
    if (peek().kind != Tok::Ident || peek().text != word) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    fail_at(peek(), what);
  }

  [[noreturn]] static void fail_at(const Token& t, const std::string& what) {
    throw ParseError(what, t.line, t.col);
  }

  void expect(Tok k, const std::string& what) {
    if (!accept(k)) fail(what);
  }

  FormulaPtr parse_formula() { return parse_implies(); }

  FormulaPtr parse_implies() {
    FormulaPtr l = parse_or();
    if (accept(Tok::Arrow)) return make_implies(std::move(l), parse_implies());
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (accept_ident("or")) l = make_or(std::move(l), parse_and());
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_until();
    while (accept_ident("and")) l = make_and(std::move(l), parse_until());
    return l;
  }

  FormulaPtr parse_until() {
    FormulaPtr l = parse_unary();
    if (peek().kind == Tok::Ident && peek().text == "until_") {
      advance();
      Interval iv = parse_interval();
      return make_until(iv, std::move(l), parse_until());
    }
    if (peek().kind == Tok::Ident && peek().text == "until")
      fail("'until' needs an interval: until_[a,b]");
    return l;
  }

  FormulaPtr parse_unary() {
    if (accept_ident("not")) return make_not(parse_unary());
    if (accept_ident("alw_")) {
      Interval iv = parse_interval();
      return make_always(iv, parse_unary());
    }
    if (accept_ident("ev_")) {
      Interval iv = parse_interval();
      return make_eventually(iv, parse_unary());
    }
    if (peek().kind == Tok::Ident &&
        (peek().text == "alw" || peek().text == "ev"))
      fail("'" + peek().text + "' needs an interval: " + peek().text +
           "_[a,b]");
    return parse_primary();
  }

  Interval parse_interval() {
    const Token& open = peek();
    expect(Tok::LBracket, "expected '[' after temporal operator");
    if (peek().kind != Tok::Number) fail("expected interval lower bound");
    double lo = advance().number;
    expect(Tok::Comma, "expected ',' in interval");
    double hi;
    if (accept_ident("inf")) {
      hi = kInf;
    } else {
      if (peek().kind != Tok::Number) fail("expected interval upper bound");
      hi = advance().number;
    }
    expect(Tok::RBracket, "expected ']' to close interval");
    if (hi == lo)
      fail_at(open, "singular interval [a,a] is not supported");
    if (hi < lo) fail_at(open, "interval upper bound below lower bound");
    return Interval{lo, hi};
  }

  FormulaPtr parse_primary() {
    if (accept_ident("true")) return make_true();
    if (accept_ident("false")) return make_false();

    // An atom and a parenthesized formula can both open with '('; try
    // the atom reading first and rewind if it does not pan out.
    std::size_t saved = pos_;
    try {
      return parse_atom();
    } catch (const ParseError&) {
      pos_ = saved;
    }
    if (accept(Tok::LParen)) {
      FormulaPtr f = parse_formula();
      expect(Tok::RParen, "expected ')'");
      return f;
    }
    fail("expected a formula");
  }

  FormulaPtr parse_atom() {
    ExprPtr lhs = parse_expr();
    Tok rel = peek().kind;
    switch (rel) {
      case Tok::Lt:
      case Tok::Le:
      case Tok::Gt:
      case Tok::Ge:
      case Tok::EqEq:
        advance();
        break;
      default:
        fail("expected a relation (<, <=, >, >=, ==)");
    }
    ExprPtr rhs = parse_expr();
    switch (rel) {
      case Tok::Lt:
        return make_atom(std::move(lhs), Rel::Lt, std::move(rhs));
      case Tok::Le:
        return make_atom(std::move(lhs), Rel::Le, std::move(rhs));
      case Tok::Gt:
        return make_atom(std::move(lhs), Rel::Gt, std::move(rhs));
      case Tok::Ge:
        return make_atom(std::move(lhs), Rel::Ge, std::move(rhs));
      default:
        return make_eq(std::move(lhs), std::move(rhs));
    }
  }

  ExprPtr parse_expr() {
    ExprPtr l = parse_term();
    for (;;) {
      if (accept(Tok::Plus))
        l = expr_add(std::move(l), parse_term());
      else if (accept(Tok::Minus))
        l = expr_sub(std::move(l), parse_term());
      else
        return l;
    }
  }

  ExprPtr parse_term() {
    ExprPtr l = parse_factor();
    while (accept(Tok::Star)) l = expr_mul(std::move(l), parse_factor());
    return l;
  }

  ExprPtr parse_factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        advance();
        return expr_const(t.number);
      case Tok::Minus: {
        advance();
        ExprPtr e = parse_factor();
        if (e->kind == Expr::Kind::Const) return expr_const(-e->value);
        return expr_sub(expr_const(0.0), std::move(e));
      }
      case Tok::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "expected ')'");
        return e;
      }
      case Tok::Ident:
        if (t.text == "abs") {
          advance();
          expect(Tok::LParen, "expected '(' after abs");
          ExprPtr e = parse_expr();
          expect(Tok::RParen, "expected ')'");
          return expr_abs(std::move(e));
        }
        if (is_keyword(t.text))
          fail("'" + t.text + "' cannot be used as a channel name");
        advance();
        return expr_channel(t.text);
      default:
        fail("expected a value expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse(const std::string& text) {
  return Parser(Lexer(text).run()).run();
}

}  // namespace falsar::stl
