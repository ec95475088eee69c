/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>

#include "hcbb/bnb.hpp"

namespace hcbb::postcheck {

// Snapshot of a node whose homotopy walk stalled: the latest converged
// point with its t value and the final step length, ready for a restart
// under aggressive limits.
struct InfeasibleRecord {
  bnb::Node node;
  model::Point last_point;
  std::optional<double> last_objective;  // absent for feasibility-only walks
  double t_v1 = 0.0;
  double dt_v2 = 0.0;
  homotopy::HcVariant variant = homotopy::HcVariant::FP;
};

InfeasibleRecord record_infeasible(const bnb::Node& node, const homotopy::HomotopyOutcome& outcome,
                                   homotopy::HcVariant variant);

enum class PostCheckAction { Skip, Refine };

// Bound-based skip: a relaxed-bound record whose last objective already
// exceeds the upper bound cannot improve the incumbent and is discarded
// without any further solve. Feasibility records are always refined.
PostCheckAction post_check(const InfeasibleRecord& rec, double f_ub);

// Refinement restart: resume the walk at the recorded (point, t) with the
// recorded step length under a much larger iteration cap and a near
// machine-precision step floor.
homotopy::HcOptions refine_options(const homotopy::HcOptions& base, const InfeasibleRecord& rec);

homotopy::HomotopyOutcome refine(const model::MinlpProblem& prob, const InfeasibleRecord& rec,
                                 double f_ub, const homotopy::HcOptions& base,
                                 const homotopy::NodeHistory& history,
                                 const homotopy::NlpSolveFn& solve);

struct PostcheckStats {
  long n_inf_post = 0;   // records still infeasible after refinement
  long refinements = 0;  // records that entered refinement
  long skips = 0;
  bool hit_time_limit = false;
};

// Engine hooks implemented by the branch-and-bound driver.
class BnbReentry {
 public:
  virtual ~BnbReentry() = default;
  virtual std::optional<InfeasibleRecord> next_record() = 0;
  virtual long remaining_records() const = 0;
  virtual double upper_bound() const = 0;
  virtual homotopy::HomotopyOutcome refine_solve(const InfeasibleRecord& rec) = 0;
  // Applies a non-stalled refinement outcome: bound prune, incumbent
  // update, or branch followed by a re-entered search.
  virtual void integrate(const InfeasibleRecord& rec, const homotopy::HomotopyOutcome& outcome) = 0;
  virtual bool out_of_time() const = 0;
};

// Drains the infeasible set: skip dominated relaxed-bound records, refine
// the rest, and count what remains infeasible.
PostcheckStats run_postcheck_loop(BnbReentry& engine);

}  // namespace hcbb::postcheck
