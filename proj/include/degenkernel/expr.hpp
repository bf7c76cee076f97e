// SPDX-License-Identifier: MIT
/**
 * @file expr.hpp
 * @brief Arithmetic expressions in one variable x for coefficient input.
 *
 * Grammar: + - * / and right-associative ^, unary minus, parentheses,
 * numeric literals, the variable x, and the functions exp log sqrt sin cos
 * abs pow(a, b). No implicit multiplication.
 */
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "degenkernel/error.hpp"

namespace degenkernel::expr {

enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node {
  Op op = Op::Number;
  double value = 0.0;   // Number
  std::string name;     // Call
  std::vector<std::shared_ptr<const Node>> args;
};

using Expr = std::shared_ptr<const Node>;

class SyntaxError : public UsageError {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

Expr parse(const std::string& src);

/// Throws DomainError naming the node for log/sqrt of negatives, division by
/// zero and non-finite results.
double eval(const Expr& e, double x);

/// Central difference (f(x+h) - f(x-h)) / (2h); h <= 0 selects the default
/// 1e-5·max(1,|x|).
double diff_num(const Expr& e, double x, double h = 0.0);

/// Canonical text: fully parenthesized binary operations and round-trip
/// exact literals.
std::string print(const Expr& e);

/// Structural equality.
bool equal(const Expr& a, const Expr& b);

}  // namespace degenkernel::expr
