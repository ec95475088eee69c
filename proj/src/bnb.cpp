/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>

#include <nlohmann/json.hpp>

#include "hcbb/postcheck.hpp"

namespace hcbb::bnb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::BB: return "bb";
    case Algorithm::HCBB_FP: return "hcbb-fp";
    case Algorithm::HCBB_RB: return "hcbb-rb";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "bb") return Algorithm::BB;
  if (name == "hcbb-fp") return Algorithm::HCBB_FP;
  if (name == "hcbb-rb") return Algorithm::HCBB_RB;
  return std::nullopt;
}

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Limit: return "limit";
  }
  return "?";
}

bool Node::is_fixed(int binary_index) const {
  for (const auto& [idx, value] : fixed)
    if (idx == binary_index) return true;
  return false;
}

namespace {

bool queue_before(const Node& a, const Node& b) {
  if (a.parent_objective != b.parent_objective) return a.parent_objective < b.parent_objective;
  return a.id < b.id;
}

}  // namespace

void NodeQueue::push(Node node) {
  heap_.push_back(std::move(node));
  std::push_heap(heap_.begin(), heap_.end(),
                 [](const Node& a, const Node& b) { return queue_before(b, a); });
}

Node NodeQueue::pop() {
  std::pop_heap(heap_.begin(), heap_.end(),
                [](const Node& a, const Node& b) { return queue_before(b, a); });
  Node n = std::move(heap_.back());
  heap_.pop_back();
  return n;
}

double NodeQueue::min_key() const {
  return heap_.empty() ? -kInf : heap_.front().parent_objective;
}

int select_branch_var(std::span<const double> values, double epsilon_int) {
  int best = -1;
  double best_dist = kInf;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    if (std::abs(y) <= epsilon_int || std::abs(y - 1.0) <= epsilon_int) continue;
    const double dist = std::abs(y - 0.5);
    // ties (within rounding noise) keep the lowest index
    if (dist < best_dist - 1e-12) {
      best = static_cast<int>(i);
      best_dist = dist;
    }
  }
  if (best < 0) throw NoFractional("no fractional binary value to branch on");
  return best;
}

bool should_prune(double node_objective, double f_ub) { return node_objective >= f_ub; }

bool is_integral(std::span<const double> values, double epsilon_int) {
  for (double y : values)
    if (std::abs(y) > epsilon_int && std::abs(y - 1.0) > epsilon_int) return false;
  return true;
}

std::pair<Node, Node> branch(const Node& parent, int idx, const model::Point& parent_point,
                             double parent_objective, int next_id) {
  if (parent.is_fixed(idx)) throw IndexError("branch variable is already fixed");
  auto make_child = [&](int target, int id) {
    Node child;
    child.id = id;
    child.parent_id = parent.id;
    child.depth = parent.depth + 1;
    child.fixed = parent.fixed;
    child.fixed.emplace_back(idx, static_cast<double>(target));
    child.parent_point = parent_point;
    child.parent_objective = parent_objective;
    return child;
  };
  Node lo = make_child(0, next_id);
  Node hi = make_child(1, next_id + 1);
  return {std::move(lo), std::move(hi)};
}

namespace {

homotopy::HcVariant to_variant(Algorithm a) {
  return a == Algorithm::HCBB_FP ? homotopy::HcVariant::FP : homotopy::HcVariant::RB;
}

class Driver : public postcheck::BnbReentry {
 public:
  Driver(const model::MinlpProblem& prob, Algorithm algorithm, const model::Point& start,
         const BnbOptions& opts, const homotopy::NlpSolveFn& solve)
      : prob_(prob), algorithm_(algorithm), start_(start), opts_(opts), solve_(solve) {
    hc_opts_.n_max = opts.hc_max_steps;
    hc_opts_.dt_min = opts.hc_dt_min;
    hc_opts_.delta_match = opts.delta_match;
    hc_opts_.nlp = opts.nlp;
  }

  SolveReport run() {
    prob_.validate();
    t0_ = Clock::now();
    report_.algorithm = algorithm_;

    Node root;
    root.id = next_id_++;
    solve_root(root);
    drain_queue();

    if (algorithm_ != Algorithm::BB) {
      post_start_ = Clock::now();
      in_postcheck_ = true;
      postcheck::PostcheckStats stats = postcheck::run_postcheck_loop(*this);
      in_postcheck_ = false;
      report_.t_post = seconds_since(post_start_);
      report_.n_inf_post = stats.n_inf_post;
      if (stats.hit_time_limit) limit_hit_ = true;
    } else {
      // No revisit pass: every infeasible node stays infeasible.
      report_.n_inf_post = report_.n_inf;
      report_.t_post = 0.0;
    }

    report_.status = limit_hit_             ? SolveStatus::Limit
                     : incumbent_.has_value() ? SolveStatus::Optimal
                                              : SolveStatus::Infeasible;
    report_.incumbent = incumbent_;
    report_.f_lb = queue_.min_key();
    if (incumbent_ && opts_.polish) apply_polish();
    report_.wall_seconds = seconds_since(t0_);
    return std::move(report_);
  }

  // --- postcheck::BnbReentry ---

  std::optional<postcheck::InfeasibleRecord> next_record() override {
    if (records_.empty()) return std::nullopt;
    auto it = std::min_element(records_.begin(), records_.end(),
                               [](const auto& a, const auto& b) { return a.node.id < b.node.id; });
    postcheck::InfeasibleRecord rec = std::move(*it);
    records_.erase(it);
    return rec;
  }

  long remaining_records() const override { return static_cast<long>(records_.size()); }

  double upper_bound() const override {
    if (incumbent_) return incumbent_->objective;
    return opts_.initial_upper_bound.value_or(kInf);
  }

  homotopy::HomotopyOutcome refine_solve(const postcheck::InfeasibleRecord& rec) override {
    homotopy::HomotopyOutcome outcome =
        postcheck::refine(prob_, rec, upper_bound(), hc_opts_, history_, solve_);
    report_.n_nlp_post += outcome.nlp_solve_count;
    return outcome;
  }

  void integrate(const postcheck::InfeasibleRecord& rec,
                 const homotopy::HomotopyOutcome& outcome) override {
    if (outcome.kind == homotopy::HomotopyOutcome::Kind::BoundPruned) {
      trace(rec.node, NodeOutcome::BoundPrunedMidPath, outcome.result.objective,
            outcome.nlp_solve_count);
      return;
    }
    remember_schedule(rec.node, outcome);
    handle_optimal(rec.node, outcome.result, outcome.nlp_solve_count);
    drain_queue();
  }

  bool out_of_time() const override {
    return seconds_since(post_start_) > opts_.postcheck_time_limit;
  }

 private:
  void solve_root(const Node& root) {
    ++report_.n_node;
    nlp::NlpOptions nopts = opts_.nlp;
    nopts.objective_mode = nlp::ObjectiveMode::Optimize;
    nlp::NlpResult res = solve_(model::relax(prob_), prob_.clip(start_), nopts);
    count_solves(1);
    if (res.status != nlp::SolveStatus::Optimal)
      throw RootFailure("root relaxation not solved: " + std::string(nlp::status_name(res.status)) +
                        (res.diagnostic.empty() ? "" : " (" + res.diagnostic + ")"));
    handle_optimal(root, res, 1);
  }

  void drain_queue() {
    while (!queue_.empty()) {
      if (report_.n_node >= opts_.node_limit || seconds_since(t0_) > opts_.time_limit) {
        limit_hit_ = true;
        return;
      }
      Node node = queue_.pop();
      process_node(node);
    }
  }

  void process_node(const Node& node) {
    ++report_.n_node;
    if (algorithm_ == Algorithm::BB) {
      std::map<int, double> pinned(node.fixed.begin(), node.fixed.end());
      nlp::NlpOptions nopts = opts_.nlp;
      nopts.objective_mode = nlp::ObjectiveMode::Optimize;
      nlp::NlpResult res = solve_(model::fix_and_bound(prob_, pinned, {}), node.parent_point, nopts);
      count_solves(1);
      if (res.status == nlp::SolveStatus::Optimal) {
        handle_optimal(node, res, 1);
      } else {
        ++report_.n_inf;
        trace(node, NodeOutcome::Infeasible, res.objective, 1);
      }
      return;
    }

    const homotopy::HcVariant variant = to_variant(algorithm_);
    homotopy::HomotopyOutcome outcome =
        run_homotopy(prob_, node.fixed, *node.anchor, variant, upper_bound(), node.parent_point,
                     node.parent_objective, hc_opts_, history_, solve_);
    count_solves(outcome.nlp_solve_count);
    NodeEvent* ev = nullptr;
    switch (outcome.kind) {
      case homotopy::HomotopyOutcome::Kind::Solved:
        remember_schedule(node, outcome);
        handle_optimal(node, outcome.result, outcome.nlp_solve_count);
        if (!report_.trace.empty()) ev = &report_.trace.back();
        break;
      case homotopy::HomotopyOutcome::Kind::BoundPruned:
        ev = trace(node, NodeOutcome::BoundPrunedMidPath, outcome.result.objective,
                   outcome.nlp_solve_count);
        break;
      case homotopy::HomotopyOutcome::Kind::Stalled:
        ++report_.n_inf;
        records_.push_back(postcheck::record_infeasible(node, outcome, variant));
        ev = trace(node, NodeOutcome::Stalled, outcome.last_objective.value_or(
                                                   std::numeric_limits<double>::quiet_NaN()),
                   outcome.nlp_solve_count);
        break;
    }
    if (ev != nullptr && opts_.collect_trace) ev->used_match = outcome.used_match;
  }

  // Common fathoming logic for an optimally solved node: prune by bound,
  // update the incumbent on integral points, branch otherwise.
  void handle_optimal(const Node& node, const nlp::NlpResult& res, int solves_used) {
    const double f_ub = upper_bound();
    if (should_prune(res.objective, f_ub)) {
      trace(node, NodeOutcome::BoundPruned, res.objective, solves_used);
      return;
    }
    const std::vector<double> ybin = prob_.binary_values(res.point);
    if (is_integral(ybin, opts_.epsilon_int)) {
      incumbent_ = Incumbent{res.point, res.objective, node.id};
      trace(node, NodeOutcome::IncumbentUpdate, res.objective, solves_used);
      return;
    }
    const int idx = select_branch_var(ybin, opts_.epsilon_int);
    auto [lo, hi] = branch(node, idx, res.point, res.objective, next_id_);
    next_id_ += 2;
    lo.anchor = homotopy::HomotopyAnchor{idx, ybin[idx], 0};
    hi.anchor = homotopy::HomotopyAnchor{idx, ybin[idx], 1};
    queue_.push(std::move(lo));
    queue_.push(std::move(hi));
    NodeEvent* ev = trace(node, NodeOutcome::Branched, res.objective, solves_used);
    if (ev != nullptr) ev->branch_index = idx;
  }

  void remember_schedule(const Node& node, const homotopy::HomotopyOutcome& outcome) {
    if (outcome.schedule.empty() || !node.anchor) return;
    homotopy::NodeHistoryEntry entry;
    entry.node_id = node.id;
    entry.branch_index = node.anchor->branch_index;
    entry.target = node.anchor->target;
    entry.parent_value = node.anchor->parent_value;
    entry.schedule = outcome.schedule;
    history_.append(std::move(entry));
  }

  void count_solves(int k) {
    if (in_postcheck_)
      report_.n_nlp_post += k;
    else
      report_.n_nlp += k;
  }

  NodeEvent* trace(const Node& node, NodeOutcome outcome, double objective, int solves) {
    if (!opts_.collect_trace) return nullptr;
    NodeEvent ev;
    ev.node_id = node.id;
    ev.parent_id = node.parent_id;
    ev.depth = node.depth;
    ev.outcome = outcome;
    ev.objective = objective;
    ev.nlp_solves = solves;
    ev.f_ub_at_event = upper_bound();
    ev.fixed = node.fixed;
    ev.in_postcheck = in_postcheck_;
    report_.trace.push_back(std::move(ev));
    return &report_.trace.back();
  }

  void apply_polish() {
    nlp::NlpOptions nopts = opts_.nlp;
    nopts.objective_mode = nlp::ObjectiveMode::Optimize;
    nlp::NlpResult polished = nlp::polish_round(prob_, incumbent_->point, opts_.epsilon_int, nopts);
    if (polished.status != nlp::SolveStatus::Optimal) return;  // keep the incumbent
    report_.polished_objective = polished.objective;
    const double denom = std::max(std::abs(incumbent_->objective), 1e-12);
    report_.polish_rel_change = (polished.objective - incumbent_->objective) / denom;
  }

  const model::MinlpProblem& prob_;
  Algorithm algorithm_;
  model::Point start_;
  BnbOptions opts_;
  homotopy::NlpSolveFn solve_;
  homotopy::HcOptions hc_opts_;

  Clock::time_point t0_;
  Clock::time_point post_start_;
  NodeQueue queue_;
  homotopy::NodeHistory history_;
  std::deque<postcheck::InfeasibleRecord> records_;
  std::optional<Incumbent> incumbent_;
  SolveReport report_;
  int next_id_ = 0;
  bool limit_hit_ = false;
  bool in_postcheck_ = false;
};

}  // namespace

SolveReport solve_minlp(const model::MinlpProblem& prob, Algorithm algorithm,
                        const model::Point& start, const BnbOptions& opts) {
  return solve_minlp_with(prob, algorithm, start, opts,
                          [](const model::MinlpProblem& p, const model::Point& s,
                             const nlp::NlpOptions& o) { return nlp::solve_nlp(p, s, o); });
}

SolveReport solve_minlp_with(const model::MinlpProblem& prob, Algorithm algorithm,
                             const model::Point& start, const BnbOptions& opts,
                             const homotopy::NlpSolveFn& solve) {
  Driver driver(prob, algorithm, start, opts, solve);
  return driver.run();
}

std::string SolveReport::to_json(int indent) const {
  nlohmann::json j;
  j["algorithm"] = algorithm_name(algorithm);
  j["status"] = solve_status_name(status);
  if (incumbent) {
    j["objective"] = incumbent->objective;
    j["point"] = incumbent->point;
    j["found_at_node"] = incumbent->found_at_node;
  } else {
    j["objective"] = nullptr;
    j["point"] = nullptr;
  }
  j["n_node"] = n_node;
  j["n_inf"] = n_inf;
  j["n_nlp"] = n_nlp;
  j["t_post_seconds"] = t_post;
  j["n_inf_post"] = n_inf_post;
  j["n_nlp_post"] = n_nlp_post;
  j["wall_seconds"] = wall_seconds;
  if (std::isfinite(f_lb))
    j["f_lb"] = f_lb;
  else
    j["f_lb"] = nullptr;
  if (polished_objective) {
    j["polish"] = {{"objective", *polished_objective}, {"relative_change", *polish_rel_change}};
  } else {
    j["polish"] = nullptr;
  }
  return j.dump(indent);
}

}  // namespace hcbb::bnb
