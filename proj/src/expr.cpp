// SPDX-License-Identifier: MIT
#include "degenkernel/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace degenkernel::expr {
namespace {

const std::array<const char*, 7> kFunctions = {"exp", "log", "sqrt", "sin", "cos", "abs", "pow"};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i];
  }
  return s;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
  double number = 0.0;
};

std::vector<std::string> operand_expected() { return {"number", "x", "function", "(", "-"}; }

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= s_.size()) return {Tok::End, start, "end of input"};
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      return {Tok::Ident, start, s_.substr(start, pos_ - start)};
    }
    ++pos_;
    switch (c) {
      case '+': return {Tok::Plus, start, "+"};
      case '-': return {Tok::Minus, start, "-"};
      case '*': return {Tok::Star, start, "*"};
      case '/': return {Tok::Slash, start, "/"};
      case '^': return {Tok::Caret, start, "^"};
      case '(': return {Tok::LParen, start, "("};
      case ')': return {Tok::RParen, start, ")"};
      case ',': return {Tok::Comma, start, ","};
      default: break;
    }
    throw SyntaxError(start, operand_expected(), std::string(1, c));
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw SyntaxError(start, {"digit"}, ".");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // 'e' belongs to whatever follows
    }
    const std::string text = s_.substr(start, pos_ - start);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc()) throw SyntaxError(start, {"number"}, text);
    return {Tok::Number, start, text, v};
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

Expr make(Op op, std::vector<Expr> args = {}, double value = 0.0, std::string name = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

struct Infix {
  Op op;
  int lbp;
  bool right;
};

bool infix_of(Tok t, Infix* out) {
  switch (t) {
    case Tok::Plus: *out = {Op::Add, 10, false}; return true;
    case Tok::Minus: *out = {Op::Sub, 10, false}; return true;
    case Tok::Star: *out = {Op::Mul, 20, false}; return true;
    case Tok::Slash: *out = {Op::Div, 20, false}; return true;
    case Tok::Caret: *out = {Op::Pow, 30, true}; return true;
    default: return false;
  }
}

constexpr int kUnaryBp = 25;

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { advance(); }

  Expr parse_all() {
    Expr e = expression(0);
    if (cur_.kind != Tok::End) throw SyntaxError(cur_.offset, {"operator", "end of input"}, cur_.text);
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Tok kind, const std::string& what) {
    if (cur_.kind != kind) throw SyntaxError(cur_.offset, {what}, cur_.text);
    advance();
  }

  Expr expression(int min_bp) {
    Expr lhs = prefix();
    for (;;) {
      Infix in{};
      if (!infix_of(cur_.kind, &in) || in.lbp <= min_bp) {
        if (!infix_of(cur_.kind, &in) && cur_.kind != Tok::End && cur_.kind != Tok::RParen &&
            cur_.kind != Tok::Comma) {
          throw SyntaxError(cur_.offset, {"operator", ")", "end of input"}, cur_.text);
        }
        break;
      }
      advance();
      Expr rhs = expression(in.right ? in.lbp - 1 : in.lbp);
      lhs = make(in.op, {lhs, rhs});
    }
    return lhs;
  }

  Expr prefix() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::Number:
        advance();
        return make(Op::Number, {}, t.number);
      case Tok::Minus:
        advance();
        return make(Op::Neg, {expression(kUnaryBp)});
      case Tok::LParen: {
        advance();
        Expr e = expression(0);
        expect(Tok::RParen, ")");
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        throw SyntaxError(t.offset, operand_expected(), t.text);
    }
  }

  Expr identifier() {
    const Token t = cur_;
    advance();
    if (t.text == "x") return make(Op::Var);
    bool known = false;
    for (const char* f : kFunctions) known = known || t.text == f;
    if (!known) {
      std::vector<std::string> names{"x"};
      for (const char* f : kFunctions) names.emplace_back(f);
      throw SyntaxError(t.offset, names, t.text);
    }
    expect(Tok::LParen, "(");
    std::vector<Expr> args{expression(0)};
    if (t.text == "pow") {
      expect(Tok::Comma, ",");
      args.push_back(expression(0));
    }
    expect(Tok::RParen, ")");
    return make(Op::Call, std::move(args), 0.0, t.text);
  }

  Lexer lex_;
  Token cur_{Tok::End, 0, ""};
};

[[noreturn]] void domain(const Node& n, const std::string& why) {
  Expr self(std::shared_ptr<const Node>{}, &n);  // non-owning alias for printing
  throw DomainError("expression domain error in '" + print(self) + "': " + why);
}

double checked(const Node& n, double v) {
  if (!std::isfinite(v)) domain(n, "non-finite result");
  return v;
}

double apply(const Node& n, double x);

double call(const Node& n, double x) {
  const double a = apply(*n.args[0], x);
  const std::string& f = n.name;
  if (f == "exp") return checked(n, std::exp(a));
  if (f == "log") {
    if (!(a > 0)) domain(n, "log of non-positive value");
    return std::log(a);
  }
  if (f == "sqrt") {
    if (a < 0) domain(n, "sqrt of negative value");
    return std::sqrt(a);
  }
  if (f == "sin") return std::sin(a);
  if (f == "cos") return std::cos(a);
  if (f == "abs") return std::fabs(a);
  if (f == "pow") return checked(n, std::pow(a, apply(*n.args[1], x)));
  domain(n, "unknown function");
}

double apply(const Node& n, double x) {
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Var: return x;
    case Op::Neg: return -apply(*n.args[0], x);
    case Op::Add: return checked(n, apply(*n.args[0], x) + apply(*n.args[1], x));
    case Op::Sub: return checked(n, apply(*n.args[0], x) - apply(*n.args[1], x));
    case Op::Mul: return checked(n, apply(*n.args[0], x) * apply(*n.args[1], x));
    case Op::Div: {
      const double den = apply(*n.args[1], x);
      if (den == 0.0) domain(n, "division by zero");
      return checked(n, apply(*n.args[0], x) / den);
    }
    case Op::Pow: return checked(n, std::pow(apply(*n.args[0], x), apply(*n.args[1], x)));
    case Op::Call: return call(n, x);
  }
  domain(n, "malformed node");
}

std::string number_text(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const char* op_text(Op op) {
  switch (op) {
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    case Op::Div: return " / ";
    case Op::Pow: return "^";
    default: return "?";
  }
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : UsageError("syntax error at byte " + std::to_string(offset) + ": expected one of {" + join(expected) +
                 "}, found '" + found + "'"),
      offset_(offset),
      expected_(std::move(expected)) {}

Expr parse(const std::string& src) { return Parser(src).parse_all(); }

double eval(const Expr& e, double x) { return apply(*e, x); }

double diff_num(const Expr& e, double x, double h) {
  if (!(h > 0)) h = 1e-5 * std::max(1.0, std::fabs(x));
  return (eval(e, x + h) - eval(e, x - h)) / (2.0 * h);
}

std::string print(const Expr& e) {
  const Node& n = *e;
  switch (n.op) {
    case Op::Number: return number_text(n.value);
    case Op::Var: return "x";
    case Op::Neg: return "(-" + print(n.args[0]) + ")";
    case Op::Call: {
      std::string s = n.name + "(" + print(n.args[0]);
      if (n.args.size() > 1) s += ", " + print(n.args[1]);
      return s + ")";
    }
    default: return "(" + print(n.args[0]) + op_text(n.op) + print(n.args[1]) + ")";
  }
}

bool equal(const Expr& a, const Expr& b) {
  if (a->op != b->op || a->name != b->name || a->args.size() != b->args.size()) return false;
  if (a->op == Op::Number && !(a->value == b->value)) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!equal(a->args[i], b->args[i])) return false;
  }
  return true;
}

}  // namespace degenkernel::expr
