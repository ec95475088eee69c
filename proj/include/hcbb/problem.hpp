/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hcbb/expr.hpp"

namespace hcbb::model {

enum class VarKind { Continuous, Binary };

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

using Point = std::vector<double>;

// Minimization problem over a continuous block followed by a binary block.
// Equalities are h_k = 0, inequalities g_k <= 0. Binary index arguments
// throughout the library refer to positions within the binary block.
struct MinlpProblem {
  std::vector<VariableSpec> variables;
  Expression objective;
  std::vector<Expression> equalities;
  std::vector<Expression> inequalities;
  std::vector<std::string> equality_labels;
  std::vector<std::string> inequality_labels;

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_continuous() const;
  int num_binary() const;
  int binary_offset() const { return num_continuous(); }

  std::vector<std::string> variable_names() const;

  // Binary-block values of a full-length point.
  std::vector<double> binary_values(const Point& p) const;

  Point midpoint() const;
  Point clip(Point p) const;

  // Enforces structural invariants; throws on violation.
  void validate() const;
};

// Every binary retyped continuous on [0,1].
MinlpProblem relax(const MinlpProblem& prob);

// Pins the listed binaries to values (fixed) or intervals (boxes); all
// remaining binaries are relaxed to [0,1]. Keys are binary-block indices.
// The result has no binary-kind variables.
MinlpProblem fix_and_bound(const MinlpProblem& prob, const std::map<int, double>& fixed,
                           const std::map<int, std::pair<double, double>>& boxes);

// Max of |h_k|, max(0, g_k) and bound violations at p; 0 iff feasible.
double max_violation(const MinlpProblem& prob, const Point& p);

std::string print_problem(const MinlpProblem& prob);

bool structurally_equal(const MinlpProblem& a, const MinlpProblem& b);

}  // namespace hcbb::model
