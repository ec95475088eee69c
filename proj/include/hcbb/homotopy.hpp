/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hcbb/nlp.hpp"
#include "hcbb/problem.hpp"

namespace hcbb::homotopy {

// Branched binary whose value walks from the parent's fractional optimum
// to its fixed target as t goes 0 -> 1.
struct HomotopyAnchor {
  int branch_index = -1;     // binary-block index
  double parent_value = 0.0; // fractional value at the parent optimum
  int target = 0;            // 0 or 1
};

// (1-t) * parent_value + t * target, t in [0,1].
double homotopy_value(const HomotopyAnchor& anchor, double t);

// Replaces entry `anchor_pos` of a fixed-value vector by the interpolated
// anchor value; the rest of the vector is returned unchanged.
std::vector<double> fixed_vector(std::vector<double> y_fixed, int anchor_pos,
                                 const HomotopyAnchor& anchor, double t);

// Fixed binaries of a node, anchor entry included at its target value.
using FixedAssignment = std::vector<std::pair<int, double>>;

// Anchor pinned at the interpolated value, other fixed binaries pinned at
// their targets, remaining binaries relaxed; original objective.
model::MinlpProblem build_nlpfx(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                                const HomotopyAnchor& anchor, double t);

// Same bounds as build_nlpfx with the objective replaced by a constant;
// intended for feasibility-only solves.
model::MinlpProblem build_nlpfp(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                                const HomotopyAnchor& anchor, double t);

// Anchor boxed to [(1-t)*parent + t, 1] (target 1) or [0, (1-t)*parent]
// (target 0); other fixed binaries pinned; original objective.
model::MinlpProblem build_nlprb(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                                const HomotopyAnchor& anchor, double t);

// Step automaton state. dt_values holds every assigned step length
// starting with dt^0; t_current is the attempt in flight and t_base the
// last accepted t.
struct StepState {
  int nu = 1;
  std::vector<double> dt_values;
  double t_base = 0.0;
  double t_current = 1.0;
};

// After a converged solve below t=1: keep the step length, or double it
// when the two most recent assigned lengths are equal. Returns
// (dt, t_next) with t_next capped at 1.
std::pair<double, double> next_on_success(const StepState& state);

// After a failed solve: halve the last assigned step length and retry
// from the last accepted t.
std::pair<double, double> next_on_failure(const StepState& state);

// Completed homotopy schedule of an earlier node: the t values that
// converged, paired with the step length used to reach each one. The last
// entry has t == 1.
struct NodeHistoryEntry {
  int node_id = -1;
  int branch_index = -1;
  int target = 0;
  double parent_value = 0.0;
  std::vector<std::pair<double, double>> schedule;
};

class NodeHistory {
 public:
  void append(NodeHistoryEntry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<NodeHistoryEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<NodeHistoryEntry> entries_;
};

// Completed node with the same branch variable and target whose starting
// fraction differs by less than delta; closest match wins, earliest entry
// on ties. Null when no candidate qualifies.
const NodeHistoryEntry* find_match(const HomotopyAnchor& anchor, const NodeHistory& history,
                                   double delta);

enum class HcVariant { FP, RB };

struct HcOptions {
  int n_max = 50;
  double dt_min = 0.01;
  double delta_match = 0.1;
  nlp::NlpOptions nlp;
  // Resume support: the walk starts at t_start with step length dt_start
  // (defaults give the fresh schedule 0 -> 1 in one step).
  double t_start = 0.0;
  double dt_start = 1.0;
};

struct HomotopyOutcome {
  enum class Kind { Solved, BoundPruned, Stalled };
  Kind kind = Kind::Stalled;

  // Solved: the node's optimal result at t=1 (for FP, from the follow-up
  // optimality solve). BoundPruned: the intermediate result whose
  // objective exceeded the upper bound.
  nlp::NlpResult result;
  double pruned_at_t = -1.0;

  // Stalled bookkeeping: last converged point/objective with its t, and
  // the final step length.
  model::Point last_point;
  std::optional<double> last_objective;
  double t_last = 0.0;
  double dt_last = 0.0;

  int nlp_solve_count = 0;
  bool used_match = false;
  std::vector<std::pair<double, double>> schedule;  // successful (t, step)
  std::vector<double> attempted_t;                  // every solve, in order
};

using NlpSolveFn = std::function<nlp::NlpResult(
    const model::MinlpProblem&, const model::Point&, const nlp::NlpOptions&)>;

// Walks t from opts.t_start toward 1 solving the variant's subproblem at
// each step, adapting the step length (halve on failure, keep on success,
// double after two equal successful lengths). A matching completed
// schedule, when available, is replayed first. Terminates Solved at t=1,
// BoundPruned when an RB step's optimum exceeds f_ub before t=1, or
// Stalled when the iteration cap or minimum step length is hit.
HomotopyOutcome run_homotopy(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                             const HomotopyAnchor& anchor, HcVariant variant, double f_ub,
                             const model::Point& start_point,
                             std::optional<double> start_objective, const HcOptions& opts,
                             const NodeHistory& history, const NlpSolveFn& solve);

}  // namespace hcbb::homotopy
