/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <string>

#include "hcbb/problem.hpp"

namespace hcbb::nlp {

enum class ObjectiveMode { Optimize, FeasibilityOnly };

enum class SolveStatus { Optimal, Feasible, Infeasible, IterationLimit };

const char* status_name(SolveStatus s);

struct NlpOptions {
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-6;
  int max_iterations = 500;  // total inner-iteration budget
  ObjectiveMode objective_mode = ObjectiveMode::Optimize;
};

struct NlpResult {
  SolveStatus status = SolveStatus::Infeasible;
  model::Point point;
  double objective = 0.0;
  double violation = 0.0;
  std::string diagnostic;

  bool success(ObjectiveMode mode) const {
    return mode == ObjectiveMode::Optimize ? status == SolveStatus::Optimal
                                           : status == SolveStatus::Feasible;
  }
};

// Local solve of a continuous problem (no binary-kind variables) from a
// start point, clipped into bounds. Optimize mode returns Optimal at a
// stationary feasible point, Infeasible when the constraint violation
// stalls with the penalty at its cap, or IterationLimit. FeasibilityOnly
// mode minimizes the squared-violation merit and returns Feasible at the
// first point within tolerance, else Infeasible. Deterministic.
NlpResult solve_nlp(const model::MinlpProblem& prob, const model::Point& start,
                    const NlpOptions& opts);

// Rounds every binary-block value within epsilon_int of 0/1, fixes it, and
// re-solves the remaining continuous problem from p. An Infeasible result
// means rounding destroyed feasibility; callers keep their incumbent.
NlpResult polish_round(const model::MinlpProblem& prob, const model::Point& p,
                       double epsilon_int, const NlpOptions& opts);

}  // namespace hcbb::nlp
