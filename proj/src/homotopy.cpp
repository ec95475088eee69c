/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hcbb::homotopy {

namespace {

void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("homotopy parameter t outside [0,1]");
}

std::map<int, double> pinned_values(const FixedAssignment& fixed, const HomotopyAnchor& anchor,
                                    double t, bool interpolate_anchor) {
  std::map<int, double> out;
  bool anchor_seen = false;
  for (const auto& [idx, value] : fixed) {
    if (idx == anchor.branch_index) {
      anchor_seen = true;
      if (interpolate_anchor) {
        out[idx] = homotopy_value(anchor, t);
        continue;
      }
      continue;  // caller boxes the anchor instead
    }
    out[idx] = value;
  }
  if (!anchor_seen)
    throw IndexError("anchor index " + std::to_string(anchor.branch_index) +
                     " is not part of the fixed set");
  return out;
}

}  // namespace

double homotopy_value(const HomotopyAnchor& anchor, double t) {
  check_t(t);
  return (1.0 - t) * anchor.parent_value + t * static_cast<double>(anchor.target);
}

std::vector<double> fixed_vector(std::vector<double> y_fixed, int anchor_pos,
                                 const HomotopyAnchor& anchor, double t) {
  if (anchor_pos < 0 || anchor_pos >= static_cast<int>(y_fixed.size()))
    throw IndexError("anchor position outside the fixed vector");
  y_fixed[anchor_pos] = homotopy_value(anchor, t);
  return y_fixed;
}

model::MinlpProblem build_nlpfx(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                                const HomotopyAnchor& anchor, double t) {
  return model::fix_and_bound(prob, pinned_values(fixed, anchor, t, true), {});
}

model::MinlpProblem build_nlpfp(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                                const HomotopyAnchor& anchor, double t) {
  model::MinlpProblem sub = build_nlpfx(prob, fixed, anchor, t);
  sub.objective = model::Expression::constant(0.0);
  return sub;
}

model::MinlpProblem build_nlprb(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                                const HomotopyAnchor& anchor, double t) {
  const double hv = homotopy_value(anchor, t);
  std::map<int, std::pair<double, double>> boxes;
  boxes[anchor.branch_index] = anchor.target == 1 ? std::make_pair(hv, 1.0)
                                                  : std::make_pair(0.0, hv);
  return model::fix_and_bound(prob, pinned_values(fixed, anchor, t, false), boxes);
}

std::pair<double, double> next_on_success(const StepState& state) {
  const std::size_t k = state.dt_values.size();
  double dt = state.dt_values.back();
  if (!(state.nu == 1 || k < 2 || state.dt_values[k - 1] != state.dt_values[k - 2]))
    dt = 2.0 * dt;
  return {dt, std::min(state.t_current + dt, 1.0)};
}

std::pair<double, double> next_on_failure(const StepState& state) {
  const double dt = state.dt_values.back() / 2.0;
  return {dt, std::min(state.t_base + dt, 1.0)};
}

const NodeHistoryEntry* find_match(const HomotopyAnchor& anchor, const NodeHistory& history,
                                   double delta) {
  const NodeHistoryEntry* best = nullptr;
  double best_gap = delta;
  for (const NodeHistoryEntry& e : history.entries()) {
    if (e.branch_index != anchor.branch_index || e.target != anchor.target) continue;
    const double gap = std::abs(e.parent_value - anchor.parent_value);
    if (gap < best_gap) {
      best = &e;
      best_gap = gap;
    }
  }
  return best;
}

namespace {

class HomotopyRun {
 public:
  HomotopyRun(const model::MinlpProblem& prob, const FixedAssignment& fixed,
              const HomotopyAnchor& anchor, HcVariant variant, double f_ub,
              const model::Point& start_point, std::optional<double> start_objective,
              const HcOptions& opts, const NodeHistory& history, const NlpSolveFn& solve)
      : prob_(prob),
        fixed_(fixed),
        anchor_(anchor),
        variant_(variant),
        f_ub_(f_ub),
        opts_(opts),
        history_(history),
        solve_(solve) {
    out_.last_point = start_point;
    out_.last_objective = variant == HcVariant::RB ? start_objective : std::nullopt;
    out_.t_last = opts.t_start;
    current_point_ = start_point;
    state_.nu = 1;
    state_.dt_values = {opts.dt_start};
    state_.t_base = opts.t_start;
    state_.t_current = std::min(opts.t_start + opts.dt_start, 1.0);
  }

  HomotopyOutcome run() {
    const NodeHistoryEntry* match = find_match(anchor_, history_, opts_.delta_match);
    if (match != nullptr) {
      out_.used_match = true;
      if (replay(*match)) return std::move(out_);
    }
    adaptive_loop();
    return std::move(out_);
  }

 private:
  nlp::NlpResult solve_step(double t) {
    model::MinlpProblem sub = variant_ == HcVariant::FP
                                  ? build_nlpfp(prob_, fixed_, anchor_, t)
                                  : build_nlprb(prob_, fixed_, anchor_, t);
    nlp::NlpOptions nopts = opts_.nlp;
    nopts.objective_mode = variant_ == HcVariant::FP ? nlp::ObjectiveMode::FeasibilityOnly
                                                     : nlp::ObjectiveMode::Optimize;
    ++out_.nlp_solve_count;
    out_.attempted_t.push_back(t);
    return solve_(sub, current_point_, nopts);
  }

  bool succeeded(const nlp::NlpResult& res) const {
    return variant_ == HcVariant::FP ? res.status == nlp::SolveStatus::Feasible
                                     : res.status == nlp::SolveStatus::Optimal;
  }

  void note_success_below_one(const nlp::NlpResult& res, double t, double step) {
    out_.schedule.emplace_back(t, step);
    out_.last_point = res.point;
    if (variant_ == HcVariant::RB) out_.last_objective = res.objective;
    out_.t_last = t;
  }

  // Terminal handling for a converged solve at t=1. Returns false only for
  // the FP variant when the follow-up optimality solve does not converge,
  // in which case the node stalls with its pre-t=1 snapshot.
  bool finish_at_one(const nlp::NlpResult& res, double step) {
    if (variant_ == HcVariant::RB) {
      out_.schedule.emplace_back(1.0, step);
      out_.kind = HomotopyOutcome::Kind::Solved;
      out_.result = res;
      return true;
    }
    model::MinlpProblem nlp0 = build_nlpfx(prob_, fixed_, anchor_, 1.0);
    nlp::NlpOptions nopts = opts_.nlp;
    nopts.objective_mode = nlp::ObjectiveMode::Optimize;
    ++out_.nlp_solve_count;
    nlp::NlpResult final = solve_(nlp0, res.point, nopts);
    if (final.status != nlp::SolveStatus::Optimal) {
      out_.kind = HomotopyOutcome::Kind::Stalled;
      out_.dt_last = state_.dt_values.back();
      return false;  // stalled, but nothing further to iterate
    }
    out_.schedule.emplace_back(1.0, step);
    out_.kind = HomotopyOutcome::Kind::Solved;
    out_.result = final;
    return true;
  }

  bool bound_prune(const nlp::NlpResult& res, double t) {
    if (variant_ != HcVariant::RB) return false;
    if (!(res.objective > f_ub_)) return false;
    out_.kind = HomotopyOutcome::Kind::BoundPruned;
    out_.result = res;
    out_.pruned_at_t = t;
    return true;
  }

  bool stalled() {
    if (state_.nu >= opts_.n_max || state_.dt_values.back() <= opts_.dt_min) {
      out_.kind = HomotopyOutcome::Kind::Stalled;
      out_.dt_last = state_.dt_values.back();
      return true;
    }
    return false;
  }

  // Replays a recorded schedule; true when the run terminated during the
  // replay. On a failed replayed step the state is prepared and control
  // falls through to the adaptive loop.
  bool replay(const NodeHistoryEntry& match) {
    bool consumed_any = false;
    for (const auto& [t_rec, dt_rec] : match.schedule) {
      if (t_rec <= opts_.t_start + 1e-15) continue;  // resume past consumed steps
      consumed_any = true;
      state_.t_current = t_rec;
      nlp::NlpResult res = solve_step(t_rec);
      if (succeeded(res)) {
        const double step = t_rec - state_.t_base;
        if (t_rec >= 1.0) {
          finish_at_one(res, step);
          return true;
        }
        note_success_below_one(res, t_rec, step);
        if (bound_prune(res, t_rec)) return true;
        current_point_ = res.point;
        state_.t_base = t_rec;
        state_.dt_values.push_back(dt_rec);
        ++state_.nu;
      } else {
        // Halve the recorded step and continue adaptively.
        state_.dt_values.push_back(dt_rec);
        const auto [dt_new, t_next] = next_on_failure(state_);
        state_.dt_values.push_back(dt_new);
        ++state_.nu;
        current_point_ = out_.last_point;
        if (stalled()) return true;
        state_.t_current = t_next;
        return false;
      }
    }
    // Exhausted schedule below t=1 (stalled donor); continue adaptively.
    if (consumed_any) {
      const auto [dt_new, t_next] = next_on_success(state_);
      state_.dt_values.push_back(dt_new);
      ++state_.nu;
      if (stalled()) return true;
      state_.t_current = t_next;
    }
    return false;
  }

  void adaptive_loop() {
    if (stalled()) return;
    while (true) {
      nlp::NlpResult res = solve_step(state_.t_current);
      if (succeeded(res)) {
        const double step = state_.t_current - state_.t_base;
        if (state_.t_current >= 1.0) {
          finish_at_one(res, step);
          return;
        }
        note_success_below_one(res, state_.t_current, step);
        if (bound_prune(res, state_.t_current)) return;
        const auto [dt_new, t_next] = next_on_success(state_);
        state_.dt_values.push_back(dt_new);
        state_.t_base = state_.t_current;
        state_.t_current = t_next;
        current_point_ = res.point;
      } else {
        const auto [dt_new, t_next] = next_on_failure(state_);
        state_.dt_values.push_back(dt_new);
        state_.t_current = t_next;
        current_point_ = out_.last_point;
      }
      ++state_.nu;
      if (stalled()) return;
    }
  }

  const model::MinlpProblem& prob_;
  const FixedAssignment& fixed_;
  const HomotopyAnchor& anchor_;
  HcVariant variant_;
  double f_ub_;
  const HcOptions& opts_;
  const NodeHistory& history_;
  const NlpSolveFn& solve_;

  StepState state_;
  model::Point current_point_;
  HomotopyOutcome out_;
};

}  // namespace

HomotopyOutcome run_homotopy(const model::MinlpProblem& prob, const FixedAssignment& fixed,
                             const HomotopyAnchor& anchor, HcVariant variant, double f_ub,
                             const model::Point& start_point,
                             std::optional<double> start_objective, const HcOptions& opts,
                             const NodeHistory& history, const NlpSolveFn& solve) {
  if (!(anchor.parent_value > 0.0 && anchor.parent_value < 1.0))
    throw RangeError("anchor parent value must be strictly fractional");
  if (anchor.target != 0 && anchor.target != 1)
    throw RangeError("anchor target must be 0 or 1");
  HomotopyRun run(prob, fixed, anchor, variant, f_ub, start_point, start_objective, opts,
                  history, solve);
  return run.run();
}

}  // namespace hcbb::homotopy
