/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/expr.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hcbb::model {

namespace {

constexpr double kSmoothAbsEps = 1e-8;

bool is_integral_exponent(double e) { return std::abs(e - std::round(e)) < 1e-9; }

[[noreturn]] void domain_fail(const char* what, int node) {
  throw DomainError(std::string("domain error: ") + what, node);
}

void check_finite(double v, const char* op, int node) {
  if (!std::isfinite(v)) domain_fail(op, node);
}

}  // namespace

const char* expr_op_name(ExprOp op) {
  switch (op) {
    case ExprOp::Constant: return "constant";
    case ExprOp::Variable: return "variable";
    case ExprOp::Negate: return "negate";
    case ExprOp::Exp: return "exp";
    case ExprOp::Log: return "log";
    case ExprOp::Sqrt: return "sqrt";
    case ExprOp::SmoothAbs: return "abs";
    case ExprOp::Add: return "add";
    case ExprOp::Sub: return "sub";
    case ExprOp::Mul: return "mul";
    case ExprOp::Div: return "div";
    case ExprOp::Pow: return "pow";
  }
  return "?";
}

Expression::Expression(std::vector<ExprNode> nodes)
    : nodes_(std::make_shared<const std::vector<ExprNode>>(std::move(nodes))) {}

Expression Expression::constant(double c) {
  return Expression({ExprNode{ExprOp::Constant, -1, -1, c, -1}});
}

Expression Expression::variable(int index) {
  if (index < 0) throw IndexError("variable index must be non-negative");
  return Expression({ExprNode{ExprOp::Variable, -1, -1, 0.0, index}});
}

Expression Expression::unary(ExprOp op, const Expression& operand) {
  if (operand.empty()) throw std::invalid_argument("empty operand");
  // Fold literal sign so printed constants round-trip structurally.
  if (op == ExprOp::Negate && operand.nodes().size() == 1 &&
      operand.nodes().front().op == ExprOp::Constant) {
    return constant(-operand.nodes().front().value);
  }
  std::vector<ExprNode> nodes = operand.nodes();
  ExprNode n{op, static_cast<std::int32_t>(nodes.size() - 1), -1, 0.0, -1};
  nodes.push_back(n);
  return Expression(std::move(nodes));
}

Expression Expression::binary(ExprOp op, const Expression& lhs, const Expression& rhs) {
  if (lhs.empty() || rhs.empty()) throw std::invalid_argument("empty operand");
  std::vector<ExprNode> nodes = lhs.nodes();
  const auto offset = static_cast<std::int32_t>(nodes.size());
  for (ExprNode n : rhs.nodes()) {
    if (n.lhs >= 0) n.lhs += offset;
    if (n.rhs >= 0) n.rhs += offset;
    nodes.push_back(n);
  }
  ExprNode n{op, offset - 1, static_cast<std::int32_t>(nodes.size() - 1), 0.0, -1};
  nodes.push_back(n);
  return Expression(std::move(nodes));
}

int Expression::max_variable_index() const {
  int m = -1;
  if (!nodes_) return m;
  for (const ExprNode& n : *nodes_)
    if (n.op == ExprOp::Variable && n.var > m) m = n.var;
  return m;
}

double Expression::evaluate(std::span<const double> point) const {
  EvalWorkspace ws;
  return evaluate(point, ws);
}

double Expression::evaluate(std::span<const double> point, EvalWorkspace& ws) const {
  const auto& nodes = *nodes_;
  ws.values.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ExprNode& n = nodes[i];
    const int ni = static_cast<int>(i);
    double v = 0.0;
    switch (n.op) {
      case ExprOp::Constant: v = n.value; break;
      case ExprOp::Variable:
        if (n.var < 0 || static_cast<std::size_t>(n.var) >= point.size())
          throw IndexError("variable index out of range");
        v = point[n.var];
        break;
      case ExprOp::Negate: v = -ws.values[n.lhs]; break;
      case ExprOp::Exp:
        v = std::exp(ws.values[n.lhs]);
        check_finite(v, "exp overflow", ni);
        break;
      case ExprOp::Log: {
        const double a = ws.values[n.lhs];
        if (a <= 0.0) domain_fail("log of non-positive value", ni);
        v = std::log(a);
        break;
      }
      case ExprOp::Sqrt: {
        const double a = ws.values[n.lhs];
        if (a < 0.0) domain_fail("sqrt of negative value", ni);
        v = std::sqrt(a);
        break;
      }
      case ExprOp::SmoothAbs: {
        const double a = ws.values[n.lhs];
        v = std::sqrt(a * a + kSmoothAbsEps * kSmoothAbsEps);
        break;
      }
      case ExprOp::Add: v = ws.values[n.lhs] + ws.values[n.rhs]; break;
      case ExprOp::Sub: v = ws.values[n.lhs] - ws.values[n.rhs]; break;
      case ExprOp::Mul: v = ws.values[n.lhs] * ws.values[n.rhs]; break;
      case ExprOp::Div: {
        const double d = ws.values[n.rhs];
        if (d == 0.0) domain_fail("division by zero", ni);
        v = ws.values[n.lhs] / d;
        break;
      }
      case ExprOp::Pow: {
        const double a = ws.values[n.lhs];
        const double b = ws.values[n.rhs];
        if (a < 0.0 && !is_integral_exponent(b)) domain_fail("pow of negative base", ni);
        if (a == 0.0 && b <= 0.0) domain_fail("pow of zero base with non-positive exponent", ni);
        v = std::pow(a, b);
        break;
      }
    }
    check_finite(v, expr_op_name(n.op), ni);
    ws.values[i] = v;
  }
  return ws.values.back();
}

void Expression::gradient_accumulate(std::span<const double> point, double scale,
                                     std::span<double> grad, EvalWorkspace& ws) const {
  evaluate(point, ws);
  const auto& nodes = *nodes_;
  ws.adjoints.assign(nodes.size(), 0.0);
  ws.adjoints.back() = scale;
  for (std::size_t ri = nodes.size(); ri-- > 0;) {
    const ExprNode& n = nodes[ri];
    const double adj = ws.adjoints[ri];
    if (adj == 0.0) continue;
    const int ni = static_cast<int>(ri);
    switch (n.op) {
      case ExprOp::Constant: break;
      case ExprOp::Variable: grad[n.var] += adj; break;
      case ExprOp::Negate: ws.adjoints[n.lhs] -= adj; break;
      case ExprOp::Exp: ws.adjoints[n.lhs] += adj * ws.values[ri]; break;
      case ExprOp::Log: ws.adjoints[n.lhs] += adj / ws.values[n.lhs]; break;
      case ExprOp::Sqrt: {
        const double s = ws.values[ri];
        if (s == 0.0) domain_fail("sqrt derivative at zero", ni);
        ws.adjoints[n.lhs] += adj * 0.5 / s;
        break;
      }
      case ExprOp::SmoothAbs:
        ws.adjoints[n.lhs] += adj * ws.values[n.lhs] / ws.values[ri];
        break;
      case ExprOp::Add:
        ws.adjoints[n.lhs] += adj;
        ws.adjoints[n.rhs] += adj;
        break;
      case ExprOp::Sub:
        ws.adjoints[n.lhs] += adj;
        ws.adjoints[n.rhs] -= adj;
        break;
      case ExprOp::Mul:
        ws.adjoints[n.lhs] += adj * ws.values[n.rhs];
        ws.adjoints[n.rhs] += adj * ws.values[n.lhs];
        break;
      case ExprOp::Div: {
        const double d = ws.values[n.rhs];
        ws.adjoints[n.lhs] += adj / d;
        ws.adjoints[n.rhs] -= adj * ws.values[ri] / d;
        break;
      }
      case ExprOp::Pow: {
        const double a = ws.values[n.lhs];
        const double b = ws.values[n.rhs];
        double da = 0.0;
        if (b == 0.0) {
          da = 0.0;
        } else if (a == 0.0) {
          if (b < 1.0) domain_fail("pow derivative at zero base", ni);
          da = (b == 1.0) ? 1.0 : 0.0;
        } else {
          da = b * std::pow(a, b - 1.0);
        }
        check_finite(da, "pow derivative", ni);
        ws.adjoints[n.lhs] += adj * da;
        // Adjoint into the exponent only matters for non-constant exponents.
        if (nodes[n.rhs].op != ExprOp::Constant) {
          if (a <= 0.0) domain_fail("pow derivative wrt exponent", ni);
          ws.adjoints[n.rhs] += adj * ws.values[ri] * std::log(a);
        }
        break;
      }
    }
  }
}

std::vector<double> Expression::gradient(std::span<const double> point) const {
  std::vector<double> g(point.size(), 0.0);
  EvalWorkspace ws;
  gradient_accumulate(point, 1.0, g, ws);
  return g;
}

bool structurally_equal(const Expression& a, const Expression& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  const auto& an = a.nodes();
  const auto& bn = b.nodes();
  if (an.size() != bn.size()) return false;
  // Arenas are built child-first by the same constructors, so positional
  // comparison is a faithful structural check.
  for (std::size_t i = 0; i < an.size(); ++i) {
    if (an[i].op != bn[i].op || an[i].lhs != bn[i].lhs || an[i].rhs != bn[i].rhs ||
        an[i].var != bn[i].var)
      return false;
    if (an[i].op == ExprOp::Constant && an[i].value != bn[i].value) return false;
  }
  return true;
}

namespace {

int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Negate: return 3;
    case ExprOp::Pow: return 4;
    default: return 5;
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string print_node(const std::vector<ExprNode>& nodes, int i,
                       const std::vector<std::string>& names) {
  const ExprNode& n = nodes[i];
  switch (n.op) {
    case ExprOp::Constant: return format_double(n.value);
    case ExprOp::Variable:
      return (n.var >= 0 && static_cast<std::size_t>(n.var) < names.size())
                 ? names[n.var]
                 : "v" + std::to_string(n.var);
    case ExprOp::Negate: {
      std::string inner = print_node(nodes, n.lhs, names);
      if (precedence(nodes[n.lhs].op) < precedence(ExprOp::Negate)) inner = "(" + inner + ")";
      return "-" + inner;
    }
    case ExprOp::Exp: return "exp(" + print_node(nodes, n.lhs, names) + ")";
    case ExprOp::Log: return "log(" + print_node(nodes, n.lhs, names) + ")";
    case ExprOp::Sqrt: return "sqrt(" + print_node(nodes, n.lhs, names) + ")";
    case ExprOp::SmoothAbs: return "abs(" + print_node(nodes, n.lhs, names) + ")";
    default: break;
  }
  const int p = precedence(n.op);
  std::string lhs = print_node(nodes, n.lhs, names);
  std::string rhs = print_node(nodes, n.rhs, names);
  const int pl = precedence(nodes[n.lhs].op);
  const int pr = precedence(nodes[n.rhs].op);
  const char* sym = n.op == ExprOp::Add   ? " + "
                    : n.op == ExprOp::Sub ? " - "
                    : n.op == ExprOp::Mul ? "*"
                    : n.op == ExprOp::Div ? "/"
                                          : "^";
  // Right operand of -, /, ^ needs parens at equal precedence; ^ is
  // right-associative so its left operand does instead.
  bool paren_l = pl < p || (n.op == ExprOp::Pow && pl == p);
  bool paren_r = pr < p || (pr == p && n.op != ExprOp::Add && n.op != ExprOp::Mul &&
                            n.op != ExprOp::Pow);
  if (paren_l) lhs = "(" + lhs + ")";
  if (paren_r) rhs = "(" + rhs + ")";
  return lhs + sym + rhs;
}

}  // namespace

std::string Expression::to_string(const std::vector<std::string>& var_names) const {
  if (empty()) return "";
  return print_node(*nodes_, root(), var_names);
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression::binary(ExprOp::Add, a, b);
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::binary(ExprOp::Sub, a, b);
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression::binary(ExprOp::Mul, a, b);
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression::binary(ExprOp::Div, a, b);
}
Expression operator-(const Expression& a) { return Expression::unary(ExprOp::Negate, a); }
Expression operator+(const Expression& a, double c) { return a + Expression::constant(c); }
Expression operator+(double c, const Expression& b) { return Expression::constant(c) + b; }
Expression operator-(const Expression& a, double c) { return a - Expression::constant(c); }
Expression operator-(double c, const Expression& b) { return Expression::constant(c) - b; }
Expression operator*(double c, const Expression& b) { return Expression::constant(c) * b; }
Expression operator*(const Expression& a, double c) { return a * Expression::constant(c); }

Expression pow(const Expression& base, const Expression& exponent) {
  return Expression::binary(ExprOp::Pow, base, exponent);
}
Expression pow(const Expression& base, double exponent) {
  return pow(base, Expression::constant(exponent));
}
Expression exp(const Expression& a) { return Expression::unary(ExprOp::Exp, a); }
Expression log(const Expression& a) { return Expression::unary(ExprOp::Log, a); }
Expression sqrt(const Expression& a) { return Expression::unary(ExprOp::Sqrt, a); }
Expression smooth_abs(const Expression& a) { return Expression::unary(ExprOp::SmoothAbs, a); }

double evaluate(const Expression& expr, std::span<const double> point) {
  return expr.evaluate(point);
}

std::vector<double> gradient(const Expression& expr, std::span<const double> point) {
  return expr.gradient(point);
}

}  // namespace hcbb::model
