/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hcbb::model {

int MinlpProblem::num_continuous() const {
  int n = 0;
  for (const auto& v : variables)
    if (v.kind == VarKind::Continuous) ++n;
  return n;
}

int MinlpProblem::num_binary() const {
  return num_vars() - num_continuous();
}

std::vector<std::string> MinlpProblem::variable_names() const {
  std::vector<std::string> names;
  names.reserve(variables.size());
  for (const auto& v : variables) names.push_back(v.name);
  return names;
}

std::vector<double> MinlpProblem::binary_values(const Point& p) const {
  const int off = binary_offset();
  return std::vector<double>(p.begin() + off, p.end());
}

Point MinlpProblem::midpoint() const {
  Point p(variables.size());
  for (std::size_t i = 0; i < variables.size(); ++i)
    p[i] = 0.5 * (variables[i].lower + variables[i].upper);
  return p;
}

Point MinlpProblem::clip(Point p) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    p[i] = std::clamp(p[i], variables[i].lower, variables[i].upper);
  return p;
}

void MinlpProblem::validate() const {
  if (variables.empty()) throw BoundError("problem has no variables");
  bool seen_binary = false;
  for (const auto& v : variables) {
    if (v.lower > v.upper)
      throw BoundError("variable " + v.name + ": lower bound exceeds upper bound");
    if (v.kind == VarKind::Binary) {
      seen_binary = true;
      if (v.lower != 0.0 || v.upper != 1.0)
        throw BoundError("binary variable " + v.name + " must have bounds [0,1]");
    } else if (seen_binary) {
      throw BoundError("continuous variable " + v.name + " follows the binary block");
    }
  }
  const int nv = num_vars();
  auto check_expr = [&](const Expression& e, const std::string& what) {
    if (e.empty()) throw SemanticError(what + " is empty");
    if (e.max_variable_index() >= nv)
      throw IndexError(what + " references a variable index out of range");
  };
  check_expr(objective, "objective");
  for (std::size_t k = 0; k < equalities.size(); ++k)
    check_expr(equalities[k], "equality " + std::to_string(k));
  for (std::size_t k = 0; k < inequalities.size(); ++k)
    check_expr(inequalities[k], "inequality " + std::to_string(k));
}

MinlpProblem relax(const MinlpProblem& prob) {
  MinlpProblem out = prob;
  for (auto& v : out.variables) {
    if (v.kind == VarKind::Binary) {
      v.kind = VarKind::Continuous;
      v.lower = 0.0;
      v.upper = 1.0;
    }
  }
  return out;
}

MinlpProblem fix_and_bound(const MinlpProblem& prob, const std::map<int, double>& fixed,
                           const std::map<int, std::pair<double, double>>& boxes) {
  const int m = prob.num_binary();
  const int off = prob.binary_offset();
  auto check_index = [&](int idx) {
    if (idx < 0 || idx >= m)
      throw IndexError("binary index " + std::to_string(idx) + " out of range (m=" +
                       std::to_string(m) + ")");
  };
  MinlpProblem out = relax(prob);
  for (const auto& [idx, value] : fixed) {
    check_index(idx);
    if (value < 0.0 || value > 1.0)
      throw BoundError("fixed value outside [0,1] for binary " + std::to_string(idx));
    out.variables[off + idx].lower = value;
    out.variables[off + idx].upper = value;
  }
  for (const auto& [idx, box] : boxes) {
    check_index(idx);
    if (fixed.count(idx)) throw BoundError("binary " + std::to_string(idx) + " both fixed and boxed");
    const auto [lo, hi] = box;
    if (lo > hi) throw BoundError("empty box for binary " + std::to_string(idx));
    if (lo < 0.0 || hi > 1.0)
      throw BoundError("box outside [0,1] for binary " + std::to_string(idx));
    out.variables[off + idx].lower = lo;
    out.variables[off + idx].upper = hi;
  }
  return out;
}

double max_violation(const MinlpProblem& prob, const Point& p) {
  if (p.size() != prob.variables.size())
    throw IndexError("point length does not match variable count");
  double v = 0.0;
  for (std::size_t i = 0; i < prob.variables.size(); ++i) {
    v = std::max(v, prob.variables[i].lower - p[i]);
    v = std::max(v, p[i] - prob.variables[i].upper);
  }
  EvalWorkspace ws;
  for (const auto& h : prob.equalities) v = std::max(v, std::abs(h.evaluate(p, ws)));
  for (const auto& g : prob.inequalities) v = std::max(v, g.evaluate(p, ws));
  return std::max(v, 0.0);
}

std::string print_problem(const MinlpProblem& prob) {
  std::ostringstream os;
  os.precision(17);
  const auto names = prob.variable_names();
  for (const auto& v : prob.variables) {
    if (v.kind == VarKind::Binary) {
      os << "var " << v.name << " bin\n";
    } else {
      os << "var " << v.name << " cont [" << v.lower << "," << v.upper << "]\n";
    }
  }
  os << "min " << prob.objective.to_string(names) << "\n";
  for (std::size_t k = 0; k < prob.equalities.size(); ++k) {
    const std::string label = k < prob.equality_labels.size() && !prob.equality_labels[k].empty()
                                  ? prob.equality_labels[k]
                                  : "h" + std::to_string(k + 1);
    os << "st " << label << ": " << prob.equalities[k].to_string(names) << " = 0\n";
  }
  for (std::size_t k = 0; k < prob.inequalities.size(); ++k) {
    const std::string label =
        k < prob.inequality_labels.size() && !prob.inequality_labels[k].empty()
            ? prob.inequality_labels[k]
            : "g" + std::to_string(k + 1);
    os << "st " << label << ": " << prob.inequalities[k].to_string(names) << " <= 0\n";
  }
  return os.str();
}

bool structurally_equal(const MinlpProblem& a, const MinlpProblem& b) {
  if (a.variables.size() != b.variables.size()) return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const auto& va = a.variables[i];
    const auto& vb = b.variables[i];
    if (va.name != vb.name || va.kind != vb.kind || va.lower != vb.lower ||
        va.upper != vb.upper)
      return false;
  }
  if (!structurally_equal(a.objective, b.objective)) return false;
  if (a.equalities.size() != b.equalities.size() ||
      a.inequalities.size() != b.inequalities.size())
    return false;
  for (std::size_t k = 0; k < a.equalities.size(); ++k)
    if (!structurally_equal(a.equalities[k], b.equalities[k])) return false;
  for (std::size_t k = 0; k < a.inequalities.size(); ++k)
    if (!structurally_equal(a.inequalities[k], b.inequalities[k])) return false;
  return true;
}

}  // namespace hcbb::model
