/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hcbb/errors.hpp"

namespace hcbb::model {

enum class ExprOp : std::uint8_t {
  Constant,
  Variable,
  Negate,
  Exp,
  Log,
  Sqrt,
  SmoothAbs,  // sqrt(u^2 + eps^2), eps = 1e-8
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

const char* expr_op_name(ExprOp op);

struct ExprNode {
  ExprOp op;
  std::int32_t lhs = -1;  // child index; unary operand or binary left
  std::int32_t rhs = -1;  // binary right
  double value = 0.0;     // Constant payload
  std::int32_t var = -1;  // Variable payload
};

// Scratch buffers for evaluate/gradient so the immutable expression can be
// shared across concurrent evaluations.
struct EvalWorkspace {
  std::vector<double> values;
  std::vector<double> adjoints;
};

// Immutable expression tree stored as a flat arena in topological order
// (children before parents, root last). Copies share the arena.
class Expression {
 public:
  Expression() = default;

  static Expression constant(double c);
  static Expression variable(int index);
  static Expression unary(ExprOp op, const Expression& operand);
  static Expression binary(ExprOp op, const Expression& lhs, const Expression& rhs);

  bool empty() const { return !nodes_ || nodes_->empty(); }
  const std::vector<ExprNode>& nodes() const { return *nodes_; }
  int root() const { return static_cast<int>(nodes_->size()) - 1; }

  // Largest variable index referenced, -1 if none.
  int max_variable_index() const;

  double evaluate(std::span<const double> point) const;
  double evaluate(std::span<const double> point, EvalWorkspace& ws) const;

  // Accumulates scale * d(expr)/dx into grad (grad.size() == point.size()).
  void gradient_accumulate(std::span<const double> point, double scale,
                           std::span<double> grad, EvalWorkspace& ws) const;

  // Full gradient vector, length point.size().
  std::vector<double> gradient(std::span<const double> point) const;

  std::string to_string(const std::vector<std::string>& var_names) const;

  friend bool structurally_equal(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::vector<ExprNode> nodes);

  std::shared_ptr<const std::vector<ExprNode>> nodes_;
};

bool structurally_equal(const Expression& a, const Expression& b);

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator+(const Expression& a, double c);
Expression operator+(double c, const Expression& b);
Expression operator-(const Expression& a, double c);
Expression operator-(double c, const Expression& b);
Expression operator*(double c, const Expression& b);
Expression operator*(const Expression& a, double c);

Expression pow(const Expression& base, const Expression& exponent);
Expression pow(const Expression& base, double exponent);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression sqrt(const Expression& a);
Expression smooth_abs(const Expression& a);

double evaluate(const Expression& expr, std::span<const double> point);
std::vector<double> gradient(const Expression& expr, std::span<const double> point);

}  // namespace hcbb::model
