/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/postcheck.hpp"

namespace hcbb::postcheck {

InfeasibleRecord record_infeasible(const bnb::Node& node, const homotopy::HomotopyOutcome& outcome,
                                   homotopy::HcVariant variant) {
  InfeasibleRecord rec;
  rec.node = node;
  rec.last_point = outcome.last_point;
  rec.last_objective = outcome.last_objective;
  rec.t_v1 = outcome.t_last;
  rec.dt_v2 = outcome.dt_last;
  rec.variant = variant;
  return rec;
}

PostCheckAction post_check(const InfeasibleRecord& rec, double f_ub) {
  if (rec.variant == homotopy::HcVariant::RB && rec.last_objective.has_value() &&
      *rec.last_objective > f_ub)
    return PostCheckAction::Skip;
  return PostCheckAction::Refine;
}

homotopy::HcOptions refine_options(const homotopy::HcOptions& base, const InfeasibleRecord& rec) {
  homotopy::HcOptions opts = base;
  opts.n_max = 1000;
  opts.dt_min = 1e-15;
  opts.t_start = rec.t_v1;
  opts.dt_start = rec.dt_v2;
  return opts;
}

homotopy::HomotopyOutcome refine(const model::MinlpProblem& prob, const InfeasibleRecord& rec,
                                 double f_ub, const homotopy::HcOptions& base,
                                 const homotopy::NodeHistory& history,
                                 const homotopy::NlpSolveFn& solve) {
  return run_homotopy(prob, rec.node.fixed, *rec.node.anchor, rec.variant, f_ub, rec.last_point,
                      rec.last_objective, refine_options(base, rec), history, solve);
}

PostcheckStats run_postcheck_loop(BnbReentry& engine) {
  PostcheckStats stats;
  while (auto rec = engine.next_record()) {
    if (engine.out_of_time()) {
      stats.hit_time_limit = true;
      stats.n_inf_post += 1 + engine.remaining_records();
      break;
    }
    if (post_check(*rec, engine.upper_bound()) == PostCheckAction::Skip) {
      ++stats.skips;
      continue;
    }
    ++stats.refinements;
    homotopy::HomotopyOutcome outcome = engine.refine_solve(*rec);
    if (outcome.kind == homotopy::HomotopyOutcome::Kind::Stalled) {
      ++stats.n_inf_post;  // permanently pruned, still infeasible
      continue;
    }
    engine.integrate(*rec, outcome);
  }
  return stats;
}

}  // namespace hcbb::postcheck
