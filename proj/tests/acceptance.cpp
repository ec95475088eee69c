/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hcbb/bench.hpp"
#include "hcbb/bnb.hpp"
#include "hcbb/homotopy.hpp"
#include "hcbb/nlp.hpp"
#include "hcbb/postcheck.hpp"

using namespace hcbb;
using bnb::Algorithm;
using model::MinlpProblem;
using model::Point;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------
// 1. Oracle equivalence on seeded convex instances.

bool criterion_oracle_equivalence(std::string& detail) {
  Check c;
  const auto t0 = Clock::now();
  int matched = 0;
  const int total = 50;
  for (int seed = 1; seed <= total; ++seed) {
    const int n = 2 + seed % 7;  // 2..8
    const int m = 1 + seed % 6;  // 1..6
    const MinlpProblem prob =
        bench::generate_instance(static_cast<std::uint64_t>(seed), n, m, bench::Family::ConvexQp);
    const bench::OracleResult oracle = bench::brute_force_solve(prob, 5, {});
    if (!oracle.objective) {
      c.expect(false, "seed " + std::to_string(seed) + ": oracle found no feasible assignment");
      continue;
    }
    bool all = true;
    for (Algorithm algo : {Algorithm::BB, Algorithm::HCBB_FP, Algorithm::HCBB_RB}) {
      const bnb::SolveReport rep = bnb::solve_minlp(prob, algo, prob.midpoint(), {});
      if (!rep.incumbent || rel_gap(rep.incumbent->objective, *oracle.objective) > 1e-6) {
        all = false;
        c.expect(false, "seed " + std::to_string(seed) + " " + bnb::algorithm_name(algo) +
                            (rep.incumbent ? " off by " +
                                                 std::to_string(rel_gap(rep.incumbent->objective,
                                                                        *oracle.objective))
                                           : " no incumbent"));
      }
    }
    if (all) ++matched;
  }
  const double wall = seconds_since(t0);
  c.expect(matched == total,
           std::to_string(matched) + "/" + std::to_string(total) + " instances matched");
  c.expect(wall <= 120.0, "wall " + std::to_string(wall) + "s exceeds 120s");
  std::ostringstream ok;
  ok << matched << "/" << total << " instances, " << wall << " s";
  detail = c.ok ? ok.str() : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 2. Worked-instance golden values.

bool criterion_worked_golden(std::string& detail) {
  Check c;
  const MinlpProblem prob = bench::worked_instance();
  for (Algorithm algo : {Algorithm::BB, Algorithm::HCBB_FP, Algorithm::HCBB_RB}) {
    const std::string tag = bnb::algorithm_name(algo);
    const bnb::SolveReport a = bnb::solve_minlp(prob, algo, prob.midpoint(), {});
    const bnb::SolveReport b = bnb::solve_minlp(prob, algo, prob.midpoint(), {});
    c.expect(a.status == bnb::SolveStatus::Optimal, tag + ": not optimal");
    if (!a.incumbent) continue;
    c.expect(std::abs(a.incumbent->objective - 0.36) <= 1e-6,
             tag + ": objective " + std::to_string(a.incumbent->objective));
    c.expect(std::abs(a.incumbent->point[1]) <= 1e-6, tag + ": y != 0");
    c.expect(a.n_node == 3, tag + ": n_node " + std::to_string(a.n_node));
    c.expect(b.incumbent && a.incumbent->objective == b.incumbent->objective &&
                 a.incumbent->point == b.incumbent->point && a.n_nlp == b.n_nlp,
             tag + ": runs differ");
  }
  detail = c.ok ? "objective 0.36 at y=0, n_node=3, deterministic (all three algorithms)"
                : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 3. Step-length automaton against scripted solver stubs.

struct ScriptStep {
  bool succeed = true;
  double objective = 0.0;
};

homotopy::HomotopyOutcome run_scripted(const std::vector<ScriptStep>& steps,
                                       homotopy::HcVariant variant, double f_ub,
                                       homotopy::HcOptions opts) {
  const MinlpProblem prob = bench::worked_instance();
  const homotopy::HomotopyAnchor anchor{0, 0.35, 1};
  const homotopy::FixedAssignment fixed{{0, 1.0}};
  int cursor = 0;
  auto fn = [&](const MinlpProblem&, const Point& start,
                const nlp::NlpOptions& nopts) -> nlp::NlpResult {
    nlp::NlpResult res;
    res.point = start;
    if (variant == homotopy::HcVariant::FP &&
        nopts.objective_mode == nlp::ObjectiveMode::Optimize) {
      res.status = nlp::SolveStatus::Optimal;
      res.objective = 1.0;
      return res;
    }
    const ScriptStep s =
        cursor < static_cast<int>(steps.size()) ? steps[cursor] : ScriptStep{false, 0.0};
    ++cursor;
    res.status = !s.succeed ? nlp::SolveStatus::Infeasible
                 : variant == homotopy::HcVariant::FP ? nlp::SolveStatus::Feasible
                                                      : nlp::SolveStatus::Optimal;
    res.objective = s.objective;
    return res;
  };
  return run_homotopy(prob, fixed, anchor, variant, f_ub, {0.35, 0.35}, 0.2375, opts, {}, fn);
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

bool criterion_step_automaton(std::string& detail) {
  Check c;
  {  // failure at t=1 leads to the 1, 0.5, ... retreat with halving
    const auto out = run_scripted({{false}, {true}, {true}}, homotopy::HcVariant::RB, 1e100, {});
    c.expect(out.kind == homotopy::HomotopyOutcome::Kind::Solved, "retreat: not solved");
    c.expect(out.attempted_t.size() == 3 && near(out.attempted_t[0], 1.0) &&
                 near(out.attempted_t[1], 0.5) && near(out.attempted_t[2], 1.0),
             "retreat: wrong t sequence");
  }
  {  // two equal successful steps double the next one
    homotopy::HcOptions opts;
    opts.t_start = 0.0;
    opts.dt_start = 0.125;
    const auto out = run_scripted({{true}, {true}, {true}, {true}, {true}},
                                  homotopy::HcVariant::RB, 1e100, opts);
    const std::vector<double> want{0.125, 0.25, 0.5, 0.75, 1.0};
    bool match = out.attempted_t.size() == want.size();
    for (std::size_t i = 0; match && i < want.size(); ++i)
      match = near(out.attempted_t[i], want[i]);
    c.expect(match, "doubling: wrong t sequence");
  }
  {  // persistent t=1 failure crosses the 0.01 floor at 0.0078125
    std::vector<ScriptStep> steps;
    for (int k = 0; k < 6; ++k) {
      steps.push_back({false, 0.0});
      steps.push_back({true, 0.0});
    }
    steps.push_back({false, 0.0});
    const auto out = run_scripted(steps, homotopy::HcVariant::FP, 1e100, {});
    c.expect(out.kind == homotopy::HomotopyOutcome::Kind::Stalled, "floor: not stalled");
    c.expect(out.nlp_solve_count == 13,
             "floor: " + std::to_string(out.nlp_solve_count) + " solves");
    c.expect(near(out.dt_last, 0.0078125), "floor: wrong final step");
    c.expect(near(out.t_last, 0.984375), "floor: wrong last success");
  }
  detail = c.ok ? "halving, doubling and the 0.0078125 < 0.01 stall all exact" : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 4. Robustness separation on narrow-channel instances.

bool criterion_robustness_separation(std::string& detail) {
  Check c;
  int separated = 0;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
  for (std::uint64_t seed : seeds) {
    const int n = 1 + static_cast<int>(seed % 3);
    const int m = 1 + static_cast<int>(seed % 2);
    const MinlpProblem prob = bench::generate_instance(seed, n, m, bench::Family::NarrowChannel);
    const bench::OracleResult oracle = bench::brute_force_solve(prob, 5, {});
    if (!oracle.objective) {
      c.expect(false, "seed " + std::to_string(seed) + ": no oracle optimum");
      continue;
    }
    const bnb::SolveReport bb = bnb::solve_minlp(prob, Algorithm::BB, prob.midpoint(), {});
    const bool bb_fails =
        !bb.incumbent || bb.incumbent->objective > *oracle.objective + 1e-4;
    c.expect(bb_fails, "seed " + std::to_string(seed) + ": baseline did not fail");
    bool hc_ok = true;
    for (Algorithm algo : {Algorithm::HCBB_FP, Algorithm::HCBB_RB}) {
      const bnb::SolveReport rep = bnb::solve_minlp(prob, algo, prob.midpoint(), {});
      if (!rep.incumbent || std::abs(rep.incumbent->objective - *oracle.objective) > 1e-5) {
        hc_ok = false;
        c.expect(false, "seed " + std::to_string(seed) + ": " + bnb::algorithm_name(algo) +
                            " missed the oracle optimum");
      }
    }
    if (bb_fails && hc_ok) ++separated;
  }
  c.expect(separated >= 5, "only " + std::to_string(separated) + " separated instances");
  detail = c.ok ? std::to_string(separated) + "/" + std::to_string(seeds.size()) +
                      " instances separate the baseline from both walks"
                : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 5. Early termination by bound with exact instrumented counts.

bool criterion_rb_early_termination(std::string& detail) {
  Check c;
  // pre-seeded incumbent 0.614; the hard node's walk meets 0.687 at t=0.5
  const auto rb = run_scripted({{false, 0.0}, {true, 0.687}}, homotopy::HcVariant::RB, 0.614, {});
  c.expect(rb.kind == homotopy::HomotopyOutcome::Kind::BoundPruned, "rb: not pruned mid-path");
  c.expect(rb.nlp_solve_count == 2, "rb: " + std::to_string(rb.nlp_solve_count) + " solves");
  c.expect(near(rb.pruned_at_t, 0.5), "rb: pruned at wrong t");

  // the feasibility walk cannot use the bound: it grinds to the floor
  std::vector<ScriptStep> fp_steps;
  for (int k = 0; k < 6; ++k) {
    fp_steps.push_back({false, 0.0});
    fp_steps.push_back({true, 0.687});
  }
  fp_steps.push_back({false, 0.0});
  const auto fp = run_scripted(fp_steps, homotopy::HcVariant::FP, 0.614, {});
  c.expect(fp.kind == homotopy::HomotopyOutcome::Kind::Stalled, "fp: did not grind to the floor");
  c.expect(fp.nlp_solve_count == 13, "fp: " + std::to_string(fp.nlp_solve_count) + " solves");
  c.expect(rb.nlp_solve_count < fp.nlp_solve_count, "rb not cheaper than fp");
  detail = c.ok ? "same node: 2 solves (bound prune) vs 13 (feasibility grind)" : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 6. Post-check economy on the fold instance.

bool criterion_postcheck_economy(std::string& detail) {
  Check c;
  const MinlpProblem prob = bench::fold_instance();
  const bnb::SolveReport rb = bnb::solve_minlp(prob, Algorithm::HCBB_RB, prob.midpoint(), {});
  c.expect(rb.status == bnb::SolveStatus::Optimal, "rb: not optimal");
  c.expect(rb.n_inf == 1, "rb: n_inf " + std::to_string(rb.n_inf));
  c.expect(rb.n_nlp_post == 0, "rb: revisit pass used " + std::to_string(rb.n_nlp_post) + " solves");
  c.expect(rb.n_inf_post == 0, "rb: n_inf_post " + std::to_string(rb.n_inf_post));
  c.expect(rb.t_post < 1.0, "rb: t_post " + std::to_string(rb.t_post));

  const bnb::SolveReport fp = bnb::solve_minlp(prob, Algorithm::HCBB_FP, prob.midpoint(), {});
  c.expect(fp.status == bnb::SolveStatus::Optimal, "fp: not optimal");
  c.expect(fp.n_inf == 1, "fp: n_inf " + std::to_string(fp.n_inf));
  c.expect(fp.n_nlp_post >= 1, "fp: refinement did not solve");
  c.expect(fp.n_inf_post == 1, "fp: n_inf_post " + std::to_string(fp.n_inf_post));
  if (rb.incumbent && fp.incumbent)
    c.expect(std::abs(rb.incumbent->objective - fp.incumbent->objective) <= 1e-5,
             "variants disagree on the optimum");
  std::ostringstream ok;
  ok << "rb: 0 revisit solves, n_inf_post 0; fp: " << fp.n_nlp_post
     << " revisit solves, n_inf_post 1";
  detail = c.ok ? ok.str() : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 7. Property invariants.

bool criterion_property_invariants(std::string& detail) {
  Check c;
  const auto t0 = Clock::now();
  bench::Rng rng(777);
  const MinlpProblem host = bench::worked_instance();
  const int yi = host.binary_offset();

  // box nesting
  for (int trial = 0; trial < 1000; ++trial) {
    const homotopy::HomotopyAnchor a{0, rng.uniform(0.01, 0.99), rng.coin() ? 1 : 0};
    const homotopy::FixedAssignment fx{{0, static_cast<double>(a.target)}};
    double t1 = rng.uniform(0.0, 1.0), t2 = rng.uniform(0.0, 1.0);
    if (t1 > t2) std::swap(t1, t2);
    const MinlpProblem outer = build_nlprb(host, fx, a, t1);
    const MinlpProblem inner = build_nlprb(host, fx, a, t2);
    if (inner.variables[yi].lower < outer.variables[yi].lower ||
        inner.variables[yi].upper > outer.variables[yi].upper) {
      c.expect(false, "box nesting violated");
      break;
    }
  }
  // endpoint exactness
  for (int trial = 0; trial < 1000; ++trial) {
    const homotopy::HomotopyAnchor a{0, rng.uniform(1e-9, 1.0 - 1e-9), rng.coin() ? 1 : 0};
    if (homotopy::homotopy_value(a, 0.0) != a.parent_value ||
        homotopy::homotopy_value(a, 1.0) != static_cast<double>(a.target)) {
      c.expect(false, "endpoint exactness violated");
      break;
    }
  }
  // gradients vs central differences
  {
    int checked = 0;
    for (int trial = 0; trial < 1400 && checked < 1000; ++trial) {
      const model::Expression e = [&] {
        // small random polynomial/exp/log trees over 3 vars, domain-safe
        std::function<model::Expression(int)> gen = [&](int depth) -> model::Expression {
          if (depth <= 0 || rng.uniform() < 0.3) {
            if (rng.coin()) return model::Expression::constant(rng.uniform(-2.0, 2.0));
            return model::Expression::variable(rng.int_in(0, 2));
          }
          switch (rng.int_in(0, 6)) {
            case 0: return gen(depth - 1) + gen(depth - 1);
            case 1: return gen(depth - 1) - gen(depth - 1);
            case 2: return gen(depth - 1) * gen(depth - 1);
            case 3: return exp(0.25 * gen(depth - 1));
            case 4: return log(smooth_abs(gen(depth - 1)) + 1.2);
            case 5: return pow(gen(depth - 1), 2.0);
            default: return gen(depth - 1) / (smooth_abs(gen(depth - 1)) + 1.5);
          }
        };
        return gen(4);
      }();
      std::vector<double> p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(-1.0, 1.0)};
      std::vector<double> analytic;
      try {
        analytic = e.gradient(p);
      } catch (const DomainError&) {
        continue;
      }
      bool ok = true;
      for (int d = 0; d < 3; ++d) {
        std::vector<double> q = p;
        q[d] = p[d] + 1e-6;
        const double fp_ = e.evaluate(q);
        q[d] = p[d] - 1e-6;
        const double fm = e.evaluate(q);
        const double numeric = (fp_ - fm) / 2e-6;
        const double scale = std::max({1.0, std::abs(analytic[d]), std::abs(numeric)});
        if (std::abs(analytic[d] - numeric) / scale > 1e-5) ok = false;
      }
      if (!ok) {
        c.expect(false, "gradient mismatch vs finite differences");
        break;
      }
      ++checked;
    }
    c.expect(checked >= 1000, "only " + std::to_string(checked) + " gradient cases");
  }
  // pruning soundness vs exhaustive enumeration (m <= 4)
  {
    long audits = 0;
    for (int seed = 1; audits < 1000 && seed <= 400; ++seed) {
      const int n = 2 + seed % 2;
      const int m = 2 + seed % 3;  // 2..4
      const MinlpProblem prob =
          bench::generate_instance(static_cast<std::uint64_t>(seed), n, m,
                                   bench::Family::ConvexQp);
      bnb::BnbOptions opts;
      opts.collect_trace = true;
      for (Algorithm algo : {Algorithm::BB, Algorithm::HCBB_RB}) {
        const bnb::SolveReport rep = bnb::solve_minlp(prob, algo, prob.midpoint(), opts);
        for (const auto& ev : rep.trace) {
          if (ev.outcome != bnb::NodeOutcome::BoundPruned &&
              ev.outcome != bnb::NodeOutcome::BoundPrunedMidPath)
            continue;
          // enumerate completions under the pruned node
          std::vector<int> free;
          for (int s = 0; s < prob.num_binary(); ++s) {
            bool fixed = false;
            for (const auto& [idx, value] : ev.fixed) fixed = fixed || idx == s;
            if (!fixed) free.push_back(s);
          }
          const long combos = 1L << free.size();
          for (long code = 0; code < combos; ++code) {
            std::map<int, double> assign(ev.fixed.begin(), ev.fixed.end());
            for (std::size_t b = 0; b < free.size(); ++b)
              assign[free[b]] = static_cast<double>((code >> b) & 1);
            const MinlpProblem sub = model::fix_and_bound(prob, assign, {});
            double best = std::numeric_limits<double>::infinity();
            for (const auto& start : bench::multistart_points(sub, 3)) {
              const nlp::NlpResult r = nlp::solve_nlp(sub, start, {});
              if (r.status == nlp::SolveStatus::Optimal) best = std::min(best, r.objective);
            }
            ++audits;
            if (best < ev.f_ub_at_event - 1e-8) {
              c.expect(false, "unsound prune at node " + std::to_string(ev.node_id) + " seed " +
                                  std::to_string(seed));
              code = combos;
            }
          }
        }
        if (!c.ok) break;
      }
      if (!c.ok) break;
    }
    c.expect(audits >= 1000, "only " + std::to_string(audits) + " pruning audits");
  }
  const double wall = seconds_since(t0);
  c.expect(wall <= 60.0, "wall " + std::to_string(wall) + "s exceeds 60s");
  std::ostringstream ok;
  ok << "nesting, endpoints, gradients, pruning audits all >= 1000 cases in " << wall << " s";
  detail = c.ok ? ok.str() : c.detail.str();
  return c.ok;
}

// ---------------------------------------------------------------------
// 8. Trace equivalence when every direct t=1 solve succeeds.

bool criterion_trace_equivalence(std::string& detail) {
  Check c;
  int qualified = 0, compared = 0;
  for (int seed = 1; seed <= 30; ++seed) {
    const int n = 2 + seed % 5;
    const int m = 1 + seed % 4;
    const MinlpProblem prob =
        bench::generate_instance(static_cast<std::uint64_t>(seed), n, m,
                                 bench::Family::ConvexQp);
    bnb::BnbOptions opts;
    opts.collect_trace = true;
    const bnb::SolveReport bb = bnb::solve_minlp(prob, Algorithm::BB, prob.midpoint(), opts);
    const bnb::SolveReport fp = bnb::solve_minlp(prob, Algorithm::HCBB_FP, prob.midpoint(), opts);
    const bnb::SolveReport rb = bnb::solve_minlp(prob, Algorithm::HCBB_RB, prob.midpoint(), opts);
    // qualification: every homotopy node finished on its first attempt
    auto direct = [](const bnb::SolveReport& rep, int per_node) {
      for (const auto& ev : rep.trace)
        if (ev.depth > 0 && ev.nlp_solves != per_node) return false;
      return rep.n_inf == 0;
    };
    if (!direct(fp, 2) || !direct(rb, 1)) continue;
    ++qualified;
    bool same = bb.trace.size() == fp.trace.size() && bb.trace.size() == rb.trace.size();
    for (std::size_t i = 0; same && i < bb.trace.size(); ++i) {
      same = bb.trace[i].node_id == fp.trace[i].node_id &&
             bb.trace[i].node_id == rb.trace[i].node_id &&
             bb.trace[i].branch_index == fp.trace[i].branch_index &&
             bb.trace[i].branch_index == rb.trace[i].branch_index;
    }
    if (same) ++compared;
    c.expect(same, "seed " + std::to_string(seed) + ": traces differ");
  }
  c.expect(qualified >= 20, "only " + std::to_string(qualified) + " qualifying instances");
  std::ostringstream ok;
  ok << compared << "/" << qualified << " qualifying instances have identical traces";
  detail = c.ok ? ok.str() : c.detail.str();
  return c.ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria{
      {"oracle equivalence on 50 convex instances", criterion_oracle_equivalence},
      {"worked-instance golden values", criterion_worked_golden},
      {"step-length automaton exact sequences", criterion_step_automaton},
      {"robustness separation on narrow channels", criterion_robustness_separation},
      {"early termination by bound (instrumented counts)", criterion_rb_early_termination},
      {"post-check economy", criterion_postcheck_economy},
      {"property invariants (>= 1000 cases each)", criterion_property_invariants},
      {"trace equivalence under direct solves", criterion_trace_equivalence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%zu] %-50s %s  (%s)\n", i + 1, criteria[i].name, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
