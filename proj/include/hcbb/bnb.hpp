/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcbb/homotopy.hpp"
#include "hcbb/nlp.hpp"
#include "hcbb/problem.hpp"

namespace hcbb::bnb {

enum class Algorithm { BB, HCBB_FP, HCBB_RB };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

// Tree vertex: the fixed binaries (with values), the branching anchor that
// created it, and the parent optimum used both as warm start and as the
// best-first key. The root has an empty fixed set and no anchor.
struct Node {
  int id = 0;
  int parent_id = -1;
  int depth = 0;
  homotopy::FixedAssignment fixed;
  std::optional<homotopy::HomotopyAnchor> anchor;
  model::Point parent_point;
  double parent_objective = -std::numeric_limits<double>::infinity();

  bool is_fixed(int binary_index) const;
};

// Best-first queue keyed by parent objective, ties by node id.
class NodeQueue {
 public:
  void push(Node node);
  Node pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double min_key() const;

 private:
  std::vector<Node> heap_;
};

struct Incumbent {
  model::Point point;
  double objective = std::numeric_limits<double>::infinity();
  int found_at_node = -1;
};

enum class NodeOutcome {
  Branched,
  IncumbentUpdate,
  BoundPruned,         // node optimum >= upper bound
  BoundPrunedMidPath,  // RB walk exceeded the upper bound before t=1
  Infeasible,          // direct solve failed (standard algorithm)
  Stalled,             // homotopy hit its step/iteration floor
};

struct NodeEvent {
  int node_id = 0;
  int parent_id = -1;
  int depth = 0;
  NodeOutcome outcome = NodeOutcome::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  int branch_index = -1;
  int nlp_solves = 0;
  double f_ub_at_event = std::numeric_limits<double>::infinity();
  homotopy::FixedAssignment fixed;
  bool in_postcheck = false;
  bool used_match = false;  // a recorded schedule was replayed at this node
};

enum class SolveStatus { Optimal, Infeasible, Limit };

const char* solve_status_name(SolveStatus s);

struct BnbOptions {
  nlp::NlpOptions nlp;
  int hc_max_steps = 50;
  double hc_dt_min = 0.01;
  double delta_match = 0.1;
  double epsilon_int = 1e-5;
  long node_limit = 10000;
  double time_limit = 3600.0;
  double postcheck_time_limit = 3600.0;
  bool collect_trace = false;
  bool polish = true;
  std::optional<double> initial_upper_bound;
};

struct SolveReport {
  Algorithm algorithm = Algorithm::BB;
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Incumbent> incumbent;
  long n_node = 0;
  long n_inf = 0;
  long n_nlp = 0;
  double t_post = 0.0;
  long n_inf_post = 0;
  long n_nlp_post = 0;
  double wall_seconds = 0.0;
  double f_lb = -std::numeric_limits<double>::infinity();
  std::optional<double> polished_objective;
  std::optional<double> polish_rel_change;
  std::vector<NodeEvent> trace;

  std::string to_json(int indent = -1) const;
};

// Index of the fractional entry closest to 0.5, lowest index on ties.
// Throws NoFractional when every entry is integral within epsilon_int.
int select_branch_var(std::span<const double> values, double epsilon_int);

// node_objective >= f_ub (boundary prunes).
bool should_prune(double node_objective, double f_ub);

bool is_integral(std::span<const double> values, double epsilon_int);

// Two children fixing binary `idx` at 0 and 1, each anchored at the
// parent's fractional value and warm-started from the parent solution.
// Ids are next_id and next_id + 1.
std::pair<Node, Node> branch(const Node& parent, int idx, const model::Point& parent_point,
                             double parent_objective, int next_id);

SolveReport solve_minlp(const model::MinlpProblem& prob, Algorithm algorithm,
                        const model::Point& start, const BnbOptions& opts);

// Test seam: identical driver with an injected NLP backend.
SolveReport solve_minlp_with(const model::MinlpProblem& prob, Algorithm algorithm,
                             const model::Point& start, const BnbOptions& opts,
                             const homotopy::NlpSolveFn& solve);

}  // namespace hcbb::bnb
