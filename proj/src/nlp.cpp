/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace hcbb::nlp {

namespace {

constexpr double kPenaltyInitial = 100.0;
constexpr double kPenaltyGrowth = 10.0;
constexpr double kPenaltyCap = 1e10;
constexpr double kMultiplierCap = 1e10;
constexpr int kMaxOuter = 40;
constexpr int kStallLimit = 3;

using model::EvalWorkspace;
using model::Expression;
using model::MinlpProblem;
using model::Point;

struct ConstraintValues {
  std::vector<double> h;
  std::vector<double> g;
  double violation = 0.0;
};

// Shared evaluation of objective/constraints with domain failures mapped
// to "no value" so line searches can reject the trial point.
class Evaluator {
 public:
  explicit Evaluator(const MinlpProblem& prob) : prob_(prob) {}

  std::optional<double> objective(const Point& x) {
    try {
      return prob_.objective.evaluate(x, ws_);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }

  bool constraints(const Point& x, ConstraintValues& out) {
    out.h.resize(prob_.equalities.size());
    out.g.resize(prob_.inequalities.size());
    out.violation = 0.0;
    try {
      for (std::size_t k = 0; k < prob_.equalities.size(); ++k) {
        out.h[k] = prob_.equalities[k].evaluate(x, ws_);
        out.violation = std::max(out.violation, std::abs(out.h[k]));
      }
      for (std::size_t k = 0; k < prob_.inequalities.size(); ++k) {
        out.g[k] = prob_.inequalities[k].evaluate(x, ws_);
        out.violation = std::max(out.violation, out.g[k]);
      }
    } catch (const DomainError&) {
      return false;
    }
    out.violation = std::max(out.violation, 0.0);
    return true;
  }

  EvalWorkspace& workspace() { return ws_; }

 private:
  const MinlpProblem& prob_;
  EvalWorkspace ws_;
};

// Dense inverse-Hessian BFGS with gradient projection onto the box.
// Merit callbacks return nullopt on domain failures.
class InnerSolver {
 public:
  InnerSolver(int n, const std::vector<double>& lo, const std::vector<double>& hi)
      : n_(n), lo_(lo), hi_(hi) {}

  void reset() {
    reset_hessian();
    scaled_ = false;
  }

  template <typename Value, typename Grad, typename Stop>
  int minimize(Point& x, Value value, Grad grad, Stop stop, double tol, int budget,
               bool& converged, bool& stopped_early) {
    converged = false;
    stopped_early = false;
    if (H_.empty()) reset();
    auto fx = value(x);
    if (!fx) return 0;
    if (stop(x)) {
      stopped_early = true;
      return 0;
    }
    std::vector<double> g(n_), d(n_), xt(n_), gt(n_), s(n_), yv(n_), masked(n_);
    std::vector<char> at_bound(n_, 0);
    if (!grad(x, g)) return 0;
    int it = 0;
    while (it < budget) {
      ++it;
      if (projected_gradient_norm(x, g) <= tol) {
        converged = true;
        return it;
      }
      // Two-metric projection: coordinates pressed against a bound step
      // along the plain gradient, the free block uses the quasi-Newton
      // metric. Avoids zigzagging against active bounds.
      for (int i = 0; i < n_; ++i) {
        const double eps_a = 1e-9 * (1.0 + std::abs(x[i]));
        at_bound[i] =
            (x[i] - lo_[i] <= eps_a && g[i] > 0.0) || (hi_[i] - x[i] <= eps_a && g[i] < 0.0);
        masked[i] = at_bound[i] ? 0.0 : g[i];
      }
      apply_hessian(masked, d);
      for (int i = 0; i < n_; ++i) d[i] = at_bound[i] ? -g[i] : -d[i];
      const double slope = dot(g, d);
      if (!(slope < -1e-14 * norm(g) * norm(d)))
        for (int i = 0; i < n_; ++i) d[i] = -g[i];

      // until curvature is known, cap the trial step at unit length
      double alpha = 1.0;
      if (!scaled_) {
        double dmax = 0.0;
        for (int i = 0; i < n_; ++i) dmax = std::max(dmax, std::abs(d[i]));
        if (dmax > 1.0) alpha = 1.0 / dmax;
      }
      bool accepted = false;
      bool tried_steepest = false;
      std::optional<double> ft;
      for (int ls = 0; ls < 90; ++ls) {
        for (int i = 0; i < n_; ++i) xt[i] = std::clamp(x[i] + alpha * d[i], lo_[i], hi_[i]);
        double step_norm = 0.0;
        for (int i = 0; i < n_; ++i) step_norm = std::max(step_norm, std::abs(xt[i] - x[i]));
        if (step_norm > 0.0) {
          ft = value(xt);
          if (ft) {
            double pred = 0.0;
            for (int i = 0; i < n_; ++i) pred += g[i] * (xt[i] - x[i]);
            if (*ft <= *fx + 1e-4 * pred || (pred >= 0.0 && *ft < *fx)) {
              accepted = true;
              break;
            }
          }
        }
        alpha *= 0.5;
        if (step_norm == 0.0 || alpha < 1e-13) {
          // blocked by the box or fully backtracked; one steepest retry
          if (tried_steepest) break;
          tried_steepest = true;
          for (int i = 0; i < n_; ++i) d[i] = -g[i];
          alpha = 1.0;
        }
      }
      if (!accepted) {
        converged = true;  // no representable descent step remains
        return it;
      }
      if (!grad(xt, gt)) {
        x = xt;
        return it;
      }
      for (int i = 0; i < n_; ++i) {
        s[i] = xt[i] - x[i];
        // curvature pairs live in the subspace that actually moved;
        // gradient changes along blocked coordinates would corrupt the
        // free-block approximation
        yv[i] = s[i] == 0.0 ? 0.0 : gt[i] - g[i];
      }
      x = xt;
      fx = ft;
      g = gt;
      if (stop(x)) {
        stopped_early = true;
        return it;
      }
      // Curvature is kept across bound activity changes; the pair guard
      // below rejects steps that would corrupt the approximation.
      const double sy = dot(s, yv);
      if (sy > 1e-10 * norm(s) * norm(yv)) {
        if (!scaled_) {
          const double yy = dot(yv, yv);
          if (yy > 0.0) {
            const double tau = sy / yy;
            for (int i = 0; i < n_; ++i) H_[static_cast<std::size_t>(i) * n_ + i] = tau;
          }
          scaled_ = true;
        }
        bfgs_update(s, yv, sy);
      }
    }
    return it;
  }

  double projected_gradient_norm(const Point& x, const std::vector<double>& g) const {
    double nrm = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double step = std::clamp(x[i] - g[i], lo_[i], hi_[i]) - x[i];
      nrm = std::max(nrm, std::abs(step));
    }
    return nrm;
  }

 private:
  void reset_hessian() {
    H_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i) H_[static_cast<std::size_t>(i) * n_ + i] = 1.0;
  }

  void apply_hessian(const std::vector<double>& v, std::vector<double>& out) const {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      const double* row = H_.data() + static_cast<std::size_t>(i) * n_;
      for (int j = 0; j < n_; ++j) acc += row[j] * v[j];
      out[i] = acc;
    }
  }

  // H <- (I - s y^T / sy) H (I - y s^T / sy) + s s^T / sy
  void bfgs_update(const std::vector<double>& s, const std::vector<double>& yv, double sy) {
    std::vector<double> Hy(n_);
    apply_hessian(yv, Hy);
    const double yHy = dot(yv, Hy);
    const double c = (sy + yHy) / (sy * sy);
    for (int i = 0; i < n_; ++i) {
      double* row = H_.data() + static_cast<std::size_t>(i) * n_;
      for (int j = 0; j < n_; ++j) {
        row[j] += c * s[i] * s[j] - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
      }
    }
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

  static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

  int n_;
  const std::vector<double>& lo_;
  const std::vector<double>& hi_;
  std::vector<double> H_;
  bool scaled_ = false;
};

class NlpSolver {
 public:
  NlpSolver(const MinlpProblem& prob, const NlpOptions& opts)
      : prob_(prob), opts_(opts), n_(prob.num_vars()), eval_(prob) {
    lo_.resize(n_);
    hi_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      lo_[i] = prob.variables[i].lower;
      hi_[i] = prob.variables[i].upper;
    }
  }

  NlpResult run(Point start) {
    for (const auto& v : prob_.variables)
      if (v.kind == model::VarKind::Binary)
        throw BoundError("solve_nlp requires a continuous problem; variable " + v.name +
                         " is binary");
    if (static_cast<int>(start.size()) != n_)
      throw IndexError("start point length does not match variable count");
    Point x = prob_.clip(std::move(start));
    return opts_.objective_mode == ObjectiveMode::FeasibilityOnly ? run_feasibility(std::move(x))
                                                                  : run_optimize(std::move(x));
  }

 private:
  NlpResult finish(SolveStatus status, Point x, std::string diagnostic = "") {
    NlpResult r;
    r.status = status;
    r.violation = model::max_violation(prob_, x);
    auto obj = eval_.objective(x);
    r.objective = obj.value_or(std::numeric_limits<double>::quiet_NaN());
    r.point = std::move(x);
    r.diagnostic = std::move(diagnostic);
    return r;
  }

  NlpResult run_feasibility(Point x) {
    ConstraintValues cv;
    if (!eval_.constraints(x, cv))
      return finish(SolveStatus::Infeasible, std::move(x), "model undefined at start point");
    if (cv.violation <= opts_.feasibility_tolerance)
      return finish(SolveStatus::Feasible, std::move(x));

    InnerSolver inner(n_, lo_, hi_);
    ConstraintValues scratch;
    auto value = [&](const Point& p) -> std::optional<double> {
      if (!eval_.constraints(p, scratch)) return std::nullopt;
      double phi = 0.0;
      for (double h : scratch.h) phi += h * h;
      for (double g : scratch.g) {
        const double gp = std::max(0.0, g);
        phi += gp * gp;
      }
      return phi;
    };
    auto grad = [&](const Point& p, std::vector<double>& out) -> bool {
      if (!eval_.constraints(p, scratch)) return false;
      std::fill(out.begin(), out.end(), 0.0);
      try {
        for (std::size_t k = 0; k < prob_.equalities.size(); ++k)
          if (scratch.h[k] != 0.0)
            prob_.equalities[k].gradient_accumulate(p, 2.0 * scratch.h[k], out,
                                                    eval_.workspace());
        for (std::size_t k = 0; k < prob_.inequalities.size(); ++k)
          if (scratch.g[k] > 0.0)
            prob_.inequalities[k].gradient_accumulate(p, 2.0 * scratch.g[k], out,
                                                      eval_.workspace());
      } catch (const DomainError&) {
        return false;
      }
      return true;
    };
    auto stop = [&](const Point& p) {
      ConstraintValues probe;
      return eval_.constraints(p, probe) && probe.violation <= opts_.feasibility_tolerance;
    };
    bool converged = false, early = false;
    inner.minimize(x, value, grad, stop, 1e-10, opts_.max_iterations, converged, early);
    if (early) return finish(SolveStatus::Feasible, std::move(x));
    return finish(SolveStatus::Infeasible, std::move(x),
                  converged ? "feasibility merit converged above tolerance"
                            : "feasibility iteration budget exhausted");
  }

  NlpResult run_optimize(Point x) {
    const std::size_t ne = prob_.equalities.size();
    const std::size_t ni = prob_.inequalities.size();
    std::vector<double> lambda(ne, 0.0), mu(ni, 0.0);
    double rho = kPenaltyInitial;

    if (ne == 0 && ni == 0) return optimize_unconstrained(std::move(x));

    InnerSolver inner(n_, lo_, hi_);
    ConstraintValues scratch;
    auto value = [&](const Point& p) -> std::optional<double> {
      auto f = eval_.objective(p);
      if (!f || !eval_.constraints(p, scratch)) return std::nullopt;
      double al = *f;
      for (std::size_t k = 0; k < ne; ++k)
        al += lambda[k] * scratch.h[k] + 0.5 * rho * scratch.h[k] * scratch.h[k];
      for (std::size_t k = 0; k < ni; ++k) {
        const double t = mu[k] + rho * scratch.g[k];
        al += t > 0.0 ? (t * t - mu[k] * mu[k]) / (2.0 * rho) : -mu[k] * mu[k] / (2.0 * rho);
      }
      return al;
    };
    auto grad = [&](const Point& p, std::vector<double>& out) -> bool {
      if (!eval_.constraints(p, scratch)) return false;
      std::fill(out.begin(), out.end(), 0.0);
      try {
        prob_.objective.gradient_accumulate(p, 1.0, out, eval_.workspace());
        for (std::size_t k = 0; k < ne; ++k)
          prob_.equalities[k].gradient_accumulate(p, lambda[k] + rho * scratch.h[k], out,
                                                  eval_.workspace());
        for (std::size_t k = 0; k < ni; ++k) {
          const double t = mu[k] + rho * scratch.g[k];
          if (t > 0.0)
            prob_.inequalities[k].gradient_accumulate(p, t, out, eval_.workspace());
        }
      } catch (const DomainError&) {
        return false;
      }
      return true;
    };
    auto no_stop = [](const Point&) { return false; };

    int budget = opts_.max_iterations;
    double v_prev = std::numeric_limits<double>::infinity();
    double v_best = v_prev;
    int stall = 0;
    ConstraintValues cv;
    if (!eval_.constraints(x, cv))
      return finish(SolveStatus::Infeasible, std::move(x), "model undefined at start point");

    for (int outer = 0; outer < kMaxOuter; ++outer) {
      double inner_tol = std::max(0.3 * opts_.optimality_tolerance, 1e-2 * std::pow(0.1, outer));
      if (v_prev <= opts_.feasibility_tolerance) inner_tol = 0.3 * opts_.optimality_tolerance;
      bool converged = false, early = false;
      const int used = inner.minimize(x, value, grad, no_stop, inner_tol,
                                      std::min(budget, 40 + 20 * n_), converged, early);
      budget -= used;

      if (!eval_.constraints(x, cv))
        return finish(SolveStatus::Infeasible, std::move(x), "model undefined at iterate");
      const double v = cv.violation;

      if (v <= opts_.feasibility_tolerance) {
        std::vector<double> g(n_);
        if (grad(x, g) &&
            inner.projected_gradient_norm(x, g) <= opts_.optimality_tolerance)
          return finish(SolveStatus::Optimal, std::move(x));
      }
      if (budget <= 0)
        return finish(SolveStatus::IterationLimit, std::move(x), "iteration budget exhausted");

      for (std::size_t k = 0; k < ne; ++k)
        lambda[k] = std::clamp(lambda[k] + rho * cv.h[k], -kMultiplierCap, kMultiplierCap);
      for (std::size_t k = 0; k < ni; ++k)
        mu[k] = std::clamp(std::max(0.0, mu[k] + rho * cv.g[k]), 0.0, kMultiplierCap);

      if (v > opts_.feasibility_tolerance && v > 0.1 * v_prev) {
        const double grown = std::min(rho * kPenaltyGrowth, kPenaltyCap);
        if (grown != rho) inner.reset();  // curvature scales with the penalty
        rho = grown;
      }

      if (rho >= kPenaltyCap && v > opts_.feasibility_tolerance) {
        if (v >= 0.999 * v_best) {
          if (++stall >= kStallLimit)
            return finish(SolveStatus::Infeasible, std::move(x),
                          "violation stalled at penalty cap");
        } else {
          stall = 0;
        }
      }
      v_best = std::min(v_best, v);
      v_prev = v;
    }
    return finish(SolveStatus::IterationLimit, std::move(x), "outer iteration cap reached");
  }

  NlpResult optimize_unconstrained(Point x) {
    InnerSolver inner(n_, lo_, hi_);
    auto value = [&](const Point& p) { return eval_.objective(p); };
    auto grad = [&](const Point& p, std::vector<double>& out) -> bool {
      std::fill(out.begin(), out.end(), 0.0);
      try {
        prob_.objective.gradient_accumulate(p, 1.0, out, eval_.workspace());
        return true;
      } catch (const DomainError&) {
        return false;
      }
    };
    auto no_stop = [](const Point&) { return false; };
    bool converged = false, early = false;
    inner.minimize(x, value, grad, no_stop, opts_.optimality_tolerance, opts_.max_iterations,
                   converged, early);
    if (converged) return finish(SolveStatus::Optimal, std::move(x));
    return finish(SolveStatus::IterationLimit, std::move(x), "iteration budget exhausted");
  }

  const MinlpProblem& prob_;
  NlpOptions opts_;
  int n_;
  Evaluator eval_;
  std::vector<double> lo_, hi_;
};

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

NlpResult solve_nlp(const model::MinlpProblem& prob, const model::Point& start,
                    const NlpOptions& opts) {
  return NlpSolver(prob, opts).run(start);
}

NlpResult polish_round(const model::MinlpProblem& prob, const model::Point& p,
                       double epsilon_int, const NlpOptions& opts) {
  const int m = prob.num_binary();
  const int off = prob.binary_offset();
  std::map<int, double> fixed;
  for (int s = 0; s < m; ++s) {
    const double y = p[off + s];
    if (std::abs(y) <= epsilon_int)
      fixed[s] = 0.0;
    else if (std::abs(y - 1.0) <= epsilon_int)
      fixed[s] = 1.0;
  }
  const model::MinlpProblem sub = fix_and_bound(prob, fixed, {});
  NlpOptions solve_opts = opts;
  solve_opts.objective_mode = ObjectiveMode::Optimize;
  return solve_nlp(sub, p, solve_opts);
}

}  // namespace hcbb::nlp
