/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hcbb::bench {

namespace {

using model::Expression;
using model::MinlpProblem;
using model::Point;
using model::VarKind;

Expression var(int i) { return Expression::variable(i); }
Expression cst(double c) { return Expression::constant(c); }

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

double radical_inverse(int index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

std::vector<Point> multistart_points(const MinlpProblem& prob, int count) {
  std::vector<Point> starts;
  if (count <= 0) return starts;
  starts.push_back(prob.midpoint());
  const int dims = prob.num_vars();
  for (int j = 1; j < count; ++j) {
    Point p(dims);
    for (int d = 0; d < dims; ++d) {
      const int base = kPrimes[d % (sizeof(kPrimes) / sizeof(kPrimes[0]))];
      const double u = radical_inverse(j, base);
      p[d] = prob.variables[d].lower + u * (prob.variables[d].upper - prob.variables[d].lower);
    }
    starts.push_back(std::move(p));
  }
  return starts;
}

OracleResult brute_force_solve(const MinlpProblem& prob, int multistarts,
                               const nlp::NlpOptions& opts) {
  const int m = prob.num_binary();
  if (m > 16)
    throw TooManyBinaries("brute force enumeration limited to 16 binaries, got " +
                          std::to_string(m));
  OracleResult out;
  const long total = 1L << m;
  nlp::NlpOptions solve_opts = opts;
  solve_opts.objective_mode = nlp::ObjectiveMode::Optimize;
  for (long code = 0; code < total; ++code) {
    std::map<int, double> fixed;
    for (int s = 0; s < m; ++s) fixed[s] = static_cast<double>((code >> s) & 1);
    const MinlpProblem sub = fix_and_bound(prob, fixed, {});
    std::optional<double> best_obj;
    Point best_point;
    nlp::SolveStatus status = nlp::SolveStatus::Infeasible;
    for (const Point& start : multistart_points(sub, std::max(multistarts, 1))) {
      nlp::NlpResult res = nlp::solve_nlp(sub, start, solve_opts);
      ++out.nlp_solves;
      if (res.status == nlp::SolveStatus::Optimal) {
        if (!best_obj || res.objective < *best_obj) {
          best_obj = res.objective;
          best_point = res.point;
        }
        status = nlp::SolveStatus::Optimal;
      } else if (status != nlp::SolveStatus::Optimal &&
                 res.status == nlp::SolveStatus::IterationLimit) {
        status = nlp::SolveStatus::IterationLimit;
      }
    }
    out.statuses.push_back(status);
    out.assignment_objectives.push_back(best_obj);
    if (best_obj && (!out.objective || *best_obj < *out.objective)) {
      out.objective = best_obj;
      out.point = best_point;
      out.assignment.clear();
      for (int s = 0; s < m; ++s) out.assignment.push_back(static_cast<int>((code >> s) & 1));
    }
  }
  return out;
}

std::string OracleResult::to_json(int indent) const {
  nlohmann::json j;
  if (objective) {
    j["objective"] = *objective;
    j["assignment"] = assignment;
    j["point"] = point;
  } else {
    j["objective"] = nullptr;
    j["assignment"] = nullptr;
    j["point"] = nullptr;
  }
  std::vector<std::string> names;
  for (auto s : statuses) names.emplace_back(nlp::status_name(s));
  j["assignment_statuses"] = names;
  j["n_nlp"] = nlp_solves;
  return j.dump(indent);
}

MinlpProblem worked_instance() {
  MinlpProblem prob;
  prob.variables = {{"x", VarKind::Continuous, 0.0, 1.0}, {"y", VarKind::Binary, 0.0, 1.0}};
  prob.objective = pow(var(0) - 0.6, 2.0) + 0.5 * var(1);
  prob.inequalities.push_back(var(0) - var(1));
  prob.inequality_labels.push_back("c1");
  prob.validate();
  return prob;
}

MinlpProblem reactor_network_instance(double conversion_target) {
  // Stages s = 1..3 in series; per unit feed flow the steady state of
  // stage s with residence time tau_s is
  //   a_{s-1} = a_s (1 + k1 tau_s)
  //   b_{s-1} + k1 tau_s a_s = b_s (1 + k2 tau_s)
  // with feed a_0 = 1, b_0 = 0. A stage switched off has tau_s = 0 and
  // passes its inlet through.
  constexpr double k1 = 0.412;
  constexpr double k2 = 0.055;
  constexpr double tau_max = 10.0;
  const double stage_cost[3] = {1.0, 1.1, 1.2};

  MinlpProblem prob;
  for (int s = 1; s <= 3; ++s)
    prob.variables.push_back({"tau" + std::to_string(s), VarKind::Continuous, 0.0, tau_max});
  for (int s = 1; s <= 3; ++s)
    prob.variables.push_back({"a" + std::to_string(s), VarKind::Continuous, 0.0, 1.0});
  for (int s = 1; s <= 3; ++s)
    prob.variables.push_back({"b" + std::to_string(s), VarKind::Continuous, 0.0, 1.0});
  for (int s = 1; s <= 3; ++s)
    prob.variables.push_back({"y" + std::to_string(s), VarKind::Binary, 0.0, 1.0});

  auto tau = [&](int s) { return var(s - 1); };
  auto a = [&](int s) { return var(3 + s - 1); };
  auto b = [&](int s) { return var(6 + s - 1); };
  auto y = [&](int s) { return var(9 + s - 1); };

  Expression cost = stage_cost[0] * y(1) + tau(1);
  for (int s = 2; s <= 3; ++s) cost = cost + stage_cost[s - 1] * y(s) + tau(s);
  prob.objective = cost;

  for (int s = 1; s <= 3; ++s) {
    Expression a_in = s == 1 ? cst(1.0) : a(s - 1);
    Expression b_in = s == 1 ? cst(0.0) : b(s - 1);
    prob.equalities.push_back(a_in - a(s) * (1.0 + k1 * tau(s)));
    prob.equality_labels.push_back("matA" + std::to_string(s));
    prob.equalities.push_back(b_in + k1 * tau(s) * a(s) - b(s) * (1.0 + k2 * tau(s)));
    prob.equality_labels.push_back("matB" + std::to_string(s));
  }
  for (int s = 1; s <= 3; ++s) {
    prob.inequalities.push_back(tau(s) - tau_max * y(s));
    prob.inequality_labels.push_back("cap" + std::to_string(s));
  }
  prob.inequalities.push_back(cst(conversion_target) - b(3));
  prob.inequality_labels.push_back("yield");
  prob.validate();
  return prob;
}

MinlpProblem fold_instance() {
  // Feasibility of the y=0 child vanishes once the relaxed value drops
  // below 0.5 (x >= 1.3 - y with x <= 0.8), so its walk stalls with an
  // objective above the y=1 incumbent.
  MinlpProblem prob;
  prob.variables = {{"x", VarKind::Continuous, 0.0, 0.8}, {"y", VarKind::Binary, 0.0, 1.0}};
  prob.objective = pow(var(1) - 0.55, 2.0) + 0.6 * var(0);
  prob.inequalities.push_back(1.3 - var(1) - var(0));
  prob.inequality_labels.push_back("gate");
  prob.validate();
  return prob;
}

MinlpProblem two_step_channel_instance() {
  MinlpProblem prob;
  prob.variables = {{"x", VarKind::Continuous, -1.0, 10.0}, {"y", VarKind::Binary, 0.0, 1.0}};
  // weak tilt in x (the equality decides which basin wins) plus a strong
  // pull keeping a boxed relaxation of y at its lower edge
  prob.objective = -0.02 * var(0) + 50.0 * var(1);
  Expression wiggle = pow(var(0) - 0.5, 2.0) + 1.0 + 130.0 * pow(1.0 - var(1), 2.0);
  prob.equalities.push_back((var(0) - 9.0 * var(1)) * wiggle * cst(1.0 / 40.0));
  prob.equality_labels.push_back("track");
  prob.validate();
  return prob;
}

homotopy::HomotopyAnchor two_step_channel_anchor() { return {0, 0.4, 1}; }

Point two_step_channel_parent_point() { return {3.6, 0.4}; }

namespace {

MinlpProblem generate_convex_qp(Rng& rng, int n, int m) {
  MinlpProblem prob;
  for (int i = 0; i < n; ++i) {
    const double c = rng.uniform(-1.0, 1.0);
    const double w = rng.uniform(1.0, 2.0);
    prob.variables.push_back({"x" + std::to_string(i + 1), VarKind::Continuous, c - w, c + w});
  }
  for (int j = 0; j < m; ++j)
    prob.variables.push_back({"y" + std::to_string(j + 1), VarKind::Binary, 0.0, 1.0});
  const int nv = n + m;

  // Feasible anchor: interior continuous point plus one binary assignment.
  Point anchor(nv);
  for (int i = 0; i < n; ++i) {
    const auto& v = prob.variables[i];
    anchor[i] = v.lower + rng.uniform(0.25, 0.75) * (v.upper - v.lower);
  }
  for (int j = 0; j < m; ++j) anchor[n + j] = rng.coin() ? 1.0 : 0.0;

  Expression f = cst(0.0);
  for (int i = 0; i < nv; ++i) {
    const double q = rng.uniform(0.5, 3.0);
    const double center = i < n ? rng.uniform(prob.variables[i].lower, prob.variables[i].upper)
                                : rng.uniform(-0.3, 1.3);
    f = f + q * pow(var(i) - center, 2.0);
  }
  const int couplings = rng.int_in(1, std::max(1, nv / 2));
  for (int c = 0; c < couplings; ++c) {
    const int i = rng.int_in(0, nv - 1);
    const int j = rng.int_in(0, nv - 1);
    if (i == j) continue;
    f = f + rng.uniform(0.1, 0.8) * pow(var(i) - var(j), 2.0);
  }
  prob.objective = f;

  const int n_eq = n >= 2 ? rng.int_in(0, 2) : 0;
  for (int k = 0; k < n_eq; ++k) {
    Expression lhs = cst(0.0);
    for (int i = 0; i < nv; ++i) {
      if (rng.uniform() < 0.5) continue;
      lhs = lhs + rng.uniform(-1.0, 1.0) * var(i);
    }
    // at least one continuous term so every assignment can adjust
    lhs = lhs + rng.uniform(0.5, 1.5) * var(rng.int_in(0, n - 1));
    prob.equalities.push_back(lhs - lhs.evaluate(anchor));
    prob.equality_labels.push_back("h" + std::to_string(k + 1));
  }
  const int n_ineq = rng.int_in(1, 3);
  for (int k = 0; k < n_ineq; ++k) {
    Expression lhs = cst(0.0);
    for (int i = 0; i < nv; ++i) {
      if (rng.uniform() < 0.4) continue;
      lhs = lhs + rng.uniform(-1.0, 1.0) * var(i);
    }
    const double slack = rng.uniform(0.1, 1.0);
    const double rhs = lhs.evaluate(anchor) + slack;
    prob.inequalities.push_back(lhs - rhs);
    prob.inequality_labels.push_back("g" + std::to_string(k + 1));
  }
  prob.validate();
  return prob;
}

MinlpProblem generate_nonconvex_poly(Rng& rng, int n, int m) {
  MinlpProblem prob;
  for (int i = 0; i < n; ++i)
    prob.variables.push_back({"x" + std::to_string(i + 1), VarKind::Continuous, -1.5, 1.5});
  for (int j = 0; j < m; ++j)
    prob.variables.push_back({"y" + std::to_string(j + 1), VarKind::Binary, 0.0, 1.0});
  const int nv = n + m;

  Expression f = cst(0.0);
  for (int i = 0; i < n; ++i) {
    const double lam = rng.uniform(0.3, 1.0);
    const double well = rng.uniform(0.3, 0.8);
    f = f + lam * pow(pow(var(i), 2.0) - well, 2.0);
    f = f + rng.uniform(-0.3, 0.3) * var(i);
  }
  for (int j = 0; j < m; ++j) {
    f = f + rng.uniform(0.2, 1.0) * pow(var(n + j) - rng.uniform(-0.2, 1.2), 2.0);
    const int i = rng.int_in(0, n - 1);
    f = f + rng.uniform(-1.0, 1.0) * var(i) * var(n + j);  // bilinear coupling
  }
  prob.objective = f;

  Point anchor(nv, 0.0);
  for (int j = 0; j < m; ++j) anchor[n + j] = rng.coin() ? 1.0 : 0.0;
  const int n_ineq = rng.int_in(1, 2);
  for (int k = 0; k < n_ineq; ++k) {
    Expression lhs = cst(0.0);
    for (int i = 0; i < nv; ++i) {
      if (rng.uniform() < 0.5) continue;
      lhs = lhs + rng.uniform(-1.0, 1.0) * var(i);
    }
    const double rhs = lhs.evaluate(anchor) + rng.uniform(0.5, 1.5);
    prob.inequalities.push_back(lhs - rhs);
    prob.inequality_labels.push_back("g" + std::to_string(k + 1));
  }
  prob.validate();
  return prob;
}

MinlpProblem generate_narrow_channel(Rng& rng, int n, int m) {
  // One equality whose root in the first continuous variable travels with
  // the first binary. Near the binary's target the constraint develops a
  // spurious violation minimum between the parent warm start and the
  // travelled root, so the direct child solve converges there and is
  // declared infeasible, while stepping the binary gradually keeps the
  // iterate on the moving root.
  const double travel = rng.uniform(7.6, 8.2);
  const double anchor_pos = rng.uniform(0.28, 0.34);
  const double well_gain = rng.uniform(2.8, 3.2);
  const double tilt = rng.uniform(0.9, 1.1);
  const double flatten = rng.uniform(25.0, 35.0);

  MinlpProblem prob;
  prob.variables.push_back({"xc", VarKind::Continuous, 0.0, 9.0});
  for (int i = 1; i < n; ++i)
    prob.variables.push_back({"x" + std::to_string(i + 1), VarKind::Continuous, -1.0, 1.0});
  for (int j = 0; j < m; ++j)
    prob.variables.push_back({"y" + std::to_string(j + 1), VarKind::Binary, 0.0, 1.0});

  Expression xc = var(0);
  Expression yc = var(n);

  // 1/w^2 with w = 0.25
  Expression well = exp(cst(-16.0) * pow(yc - anchor_pos, 2.0));
  Expression f = cst(-0.02) * xc - well_gain * well - tilt * yc;
  for (int i = 1; i < n; ++i) f = f + pow(var(i) - rng.uniform(-0.5, 0.5), 2.0);
  for (int j = 1; j < m; ++j) {
    const double target = rng.coin() ? 0.92 : 0.08;
    f = f + rng.uniform(0.5, 1.0) * pow(var(n + j) - target, 2.0);
  }
  prob.objective = f;

  Expression wiggle = pow(xc - 4.0, 2.0) + 1.0 + flatten * pow(1.0 - yc, 2.0);
  prob.equalities.push_back((xc - travel * yc) * wiggle * cst(1.0 / 40.0));
  prob.equality_labels.push_back("track");
  prob.validate();
  return prob;
}

}  // namespace

MinlpProblem generate_instance(std::uint64_t seed, int n, int m, Family family) {
  if (n > 12 || m > 8) throw BoundError("generator limits: n <= 12, m <= 8");
  if (n < 1 || m < 1) throw BoundError("generator needs n >= 1 and m >= 1");
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(family) + 1);
  switch (family) {
    case Family::ConvexQp: return generate_convex_qp(rng, n, m);
    case Family::NonconvexPoly: return generate_nonconvex_poly(rng, n, m);
    case Family::NarrowChannel: return generate_narrow_channel(rng, n, m);
  }
  throw BoundError("unknown family");
}

std::vector<BenchInstance> make_suite(const std::string& name, int count) {
  std::vector<BenchInstance> out;
  auto add_family = [&](Family family, const char* tag, auto dims) {
    for (int seed = 1; seed <= count; ++seed) {
      auto [n, m] = dims(seed);
      out.push_back({std::string(tag) + std::to_string(seed),
                     generate_instance(static_cast<std::uint64_t>(seed), n, m, family)});
    }
  };
  if (name == "worked" || name == "all") out.push_back({"worked", worked_instance()});
  if (name == "reactor" || name == "all") out.push_back({"reactor", reactor_network_instance()});
  if (name == "fold" || name == "all") out.push_back({"fold", fold_instance()});
  if (name == "convex" || name == "all")
    add_family(Family::ConvexQp, "convex-", [](int seed) {
      return std::make_pair(2 + seed % 7, 1 + seed % 6);
    });
  if (name == "nonconvex" || name == "all")
    add_family(Family::NonconvexPoly, "nonconvex-", [](int seed) {
      return std::make_pair(2 + seed % 4, 1 + seed % 4);
    });
  if (name == "narrow" || name == "all")
    add_family(Family::NarrowChannel, "narrow-", [](int seed) {
      return std::make_pair(1 + seed % 3, 1 + seed % 2);
    });
  if (out.empty()) throw BoundError("unknown suite '" + name + "'");
  return out;
}

BenchmarkReport run_benchmark(const std::vector<BenchInstance>& instances,
                              const std::vector<bnb::Algorithm>& algorithms,
                              const BenchOptions& opts) {
  BenchmarkReport report;
  struct Cell {
    std::size_t instance;
    bnb::Algorithm algo;
    int start;
  };
  const int starts = std::max(1, opts.start_count);
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (bnb::Algorithm a : algorithms)
      for (int s = 0; s < starts; ++s) cells.push_back({i, a, s});

  std::vector<OracleResult> oracles(instances.size());
  auto oracle_of = [&](std::size_t i) {
    return brute_force_solve(instances[i].problem, opts.multistarts, opts.bnb.nlp);
  };
  auto solve_cell = [&](const Cell& c) {
    const auto& inst = instances[c.instance];
    const model::Point start = multistart_points(inst.problem, c.start + 1).back();
    BenchmarkRow row;
    row.instance = inst.name;
    row.algorithm = bnb::algorithm_name(c.algo);
    row.start_index = c.start;
    try {
      bnb::SolveReport rep = bnb::solve_minlp(inst.problem, c.algo, start, opts.bnb);
      row.status = rep.status;
      if (rep.incumbent) row.objective = rep.incumbent->objective;
      row.n_node = rep.n_node;
      row.n_inf = rep.n_inf;
      row.n_nlp = rep.n_nlp;
      row.t_post = rep.t_post;
      row.n_inf_post = rep.n_inf_post;
      row.wall_seconds = rep.wall_seconds;
    } catch (const RootFailure&) {
      row.status = bnb::SolveStatus::Infeasible;  // root relaxation lost from this start
      row.n_node = 1;
      row.n_inf = 1;
      row.n_nlp = 1;
      row.n_inf_post = 1;
    }
    return row;
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) oracles[i] = oracle_of(i);
    for (const Cell& c : cells) report.rows.push_back(solve_cell(c));
  } else {
    std::vector<std::future<OracleResult>> ofut;
    ofut.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i)
      ofut.push_back(std::async(std::launch::async, oracle_of, i));
    for (std::size_t i = 0; i < instances.size(); ++i) oracles[i] = ofut[i].get();
    std::vector<std::future<BenchmarkRow>> rfut;
    rfut.reserve(cells.size());
    for (const Cell& c : cells) rfut.push_back(std::async(std::launch::async, solve_cell, c));
    for (auto& f : rfut) report.rows.push_back(f.get());
  }

  for (std::size_t k = 0; k < cells.size(); ++k) {
    BenchmarkRow& row = report.rows[k];
    const OracleResult& oracle = oracles[cells[k].instance];
    row.oracle_objective = oracle.objective;
    if (!oracle.objective) {
      row.matches_oracle = !row.objective.has_value();
    } else if (row.objective) {
      const double scale = std::max(1.0, std::abs(*oracle.objective));
      row.matches_oracle = std::abs(*row.objective - *oracle.objective) <= 1e-6 * scale;
    }
  }
  return report;
}

std::string BenchmarkReport::to_text() const {
  std::ostringstream os;
  os << "instance        algorithm  start status      objective      oracle         n_node  "
        "n_inf  n_nlp  t_post(s)  n_inf_post  wall(s)\n";
  char buf[256];
  for (const BenchmarkRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%-15s %-10s %5d %-11s %-14s %-14s %6ld %6ld %6ld %10.2f %11ld %8.2f\n",
                  r.instance.c_str(), r.algorithm.c_str(), r.start_index,
                  bnb::solve_status_name(r.status),
                  r.objective ? std::to_string(*r.objective).c_str() : "-",
                  r.oracle_objective ? std::to_string(*r.oracle_objective).c_str() : "-",
                  r.n_node, r.n_inf, r.n_nlp, r.t_post, r.n_inf_post, r.wall_seconds);
    os << buf;
  }
  return os.str();
}

std::string BenchmarkReport::to_json(int indent) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchmarkRow& r : rows) {
    nlohmann::json j;
    j["instance"] = r.instance;
    j["algorithm"] = r.algorithm;
    j["start"] = r.start_index;
    j["status"] = bnb::solve_status_name(r.status);
    if (r.objective)
      j["objective"] = *r.objective;
    else
      j["objective"] = nullptr;
    if (r.oracle_objective)
      j["oracle_objective"] = *r.oracle_objective;
    else
      j["oracle_objective"] = nullptr;
    j["matches_oracle"] = r.matches_oracle;
    j["n_node"] = r.n_node;
    j["n_inf"] = r.n_inf;
    j["n_nlp"] = r.n_nlp;
    j["t_post_seconds"] = r.t_post;
    j["n_inf_post"] = r.n_inf_post;
    j["wall_seconds"] = r.wall_seconds;
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

}  // namespace hcbb::bench
