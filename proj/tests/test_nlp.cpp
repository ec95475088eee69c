/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include "hcbb/bench.hpp"
#include "hcbb/nlp.hpp"
#include "hcbb/parser.hpp"

using namespace hcbb;
using model::Expression;
using model::MinlpProblem;
using model::VarKind;
using nlp::NlpOptions;
using nlp::NlpResult;
using nlp::SolveStatus;

namespace {
Expression v(int i) { return Expression::variable(i); }
}  // namespace

TEST_CASE("unconstrained quadratic") {
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, 0.0, 2.0}};
  p.objective = pow(v(0) - 1.0, 2.0);
  const NlpResult r = nlp::solve_nlp(p, {0.0}, {});
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.violation == 0.0);
}

TEST_CASE("equality-constrained symmetric optimum") {
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, -2.0, 2.0}, {"y", VarKind::Continuous, -2.0, 2.0}};
  p.objective = pow(v(0), 2.0) + pow(v(1), 2.0);
  p.equalities.push_back(v(0) + v(1) - 1.0);
  const NlpResult r = nlp::solve_nlp(p, {-1.5, 1.7}, {});
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.point[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.point[1] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.violation <= 1e-7);
}

TEST_CASE("infeasible box/inequality combination") {
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, 0.0, 1.0}};
  p.objective = v(0);
  p.inequalities.push_back(2.0 - v(0));  // x >= 2 impossible in [0,1]
  const NlpResult r = nlp::solve_nlp(p, {0.5}, {});
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK(r.violation > 0.5);
}

TEST_CASE("violation field equals max_violation") {
  const MinlpProblem p = model::parse_problem(
      "var x cont [0,2]; var z cont [-1,1]; min x^2 + z^2; st h: x + z - 1 = 0; st g: x - 3 <= 0");
  const NlpResult r = nlp::solve_nlp(p, {1.7, -0.3}, {});
  CHECK(std::abs(r.violation - model::max_violation(p, r.point)) <= 1e-12);
}

TEST_CASE("determinism: identical inputs, identical results") {
  const MinlpProblem p = bench::generate_instance(11, 4, 0 + 1, bench::Family::ConvexQp);
  const MinlpProblem sub = model::fix_and_bound(p, {{0, 1.0}}, {});
  const NlpResult a = nlp::solve_nlp(sub, sub.midpoint(), {});
  const NlpResult b = nlp::solve_nlp(sub, sub.midpoint(), {});
  CHECK(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.point == b.point);
}

TEST_CASE("convex problems reach the unique optimum from any start") {
  // analytic check: min (x-3)^2 + (z+1)^2 st x + z = 1 inside a wide box
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, -10.0, 10.0},
                 {"z", VarKind::Continuous, -10.0, 10.0}};
  p.objective = pow(v(0) - 3.0, 2.0) + pow(v(1) + 1.0, 2.0);
  p.equalities.push_back(v(0) + v(1) - 1.0);
  // KKT: x - z = 4 with x + z = 1 -> x = 2.5, z = -1.5, f = 0.5
  bench::Rng rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    model::Point start = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    const NlpResult r = nlp::solve_nlp(p, start, {});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(std::abs(r.objective - 0.5) <= 1e-6);
    CHECK(r.point[0] == doctest::Approx(2.5).epsilon(1e-4));
  }
}

TEST_CASE("bound-active optimum") {
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, 0.0, 1.0}};
  p.objective = pow(v(0) - 2.0, 2.0);  // unconstrained minimum outside the box
  const NlpResult r = nlp::solve_nlp(p, {0.2}, {});
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.point[0] == 1.0);  // exactly on the bound
}

TEST_CASE("feasibility-only mode") {
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, -2.0, 2.0}, {"z", VarKind::Continuous, -2.0, 2.0}};
  p.objective = Expression::constant(0.0);
  p.equalities.push_back(v(0) + v(1) - 1.0);
  p.inequalities.push_back(v(0) - v(1));  // x <= z
  NlpOptions opts;
  opts.objective_mode = nlp::ObjectiveMode::FeasibilityOnly;

  SUBCASE("finds a feasible point") {
    const NlpResult r = nlp::solve_nlp(p, {-1.0, -1.0}, opts);
    CHECK(r.status == SolveStatus::Feasible);
    CHECK(r.violation <= opts.feasibility_tolerance);
  }
  SUBCASE("already-feasible start returns immediately") {
    const model::Point feasible = {0.25, 0.75};
    const NlpResult r = nlp::solve_nlp(p, feasible, opts);
    CHECK(r.status == SolveStatus::Feasible);
    CHECK(r.point == feasible);  // zero iterations: the start is kept bit-identically
  }
  SUBCASE("declares infeasibility") {
    MinlpProblem q = p;
    q.inequalities.push_back(3.0 - v(0));  // x >= 3 impossible
    const NlpResult r = nlp::solve_nlp(q, {0.0, 0.0}, opts);
    CHECK(r.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("start points outside the box are clipped inward") {
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, 0.0, 1.0}};
  p.objective = pow(v(0) - 0.25, 2.0);
  const NlpResult r = nlp::solve_nlp(p, {55.0}, {});
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.point[0] == doctest::Approx(0.25));
}

TEST_CASE("binary variables are rejected") {
  MinlpProblem p;
  p.variables = {{"y", VarKind::Binary, 0.0, 1.0}};
  p.objective = v(0);
  CHECK_THROWS_AS(nlp::solve_nlp(p, {0.5}, {}), BoundError);
}

TEST_CASE("polish_round") {
  const MinlpProblem p = bench::worked_instance();

  SUBCASE("near-integral values are fixed and re-solved") {
    const NlpResult r = nlp::polish_round(p, {0.0, 1e-7}, 1e-5, {});
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.point[1] == 0.0);
    CHECK(r.objective == doctest::Approx(0.36).epsilon(1e-6));
  }
  SUBCASE("exactly integral point is a fixed point") {
    const NlpResult r = nlp::polish_round(p, {0.0, 0.0}, 1e-5, {});
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0.36).epsilon(1e-6));
  }
  SUBCASE("rounding that destroys feasibility is reported") {
    // x fixed region empty: y rounds to 0 forces x <= 0 while x >= 0.5
    MinlpProblem q = p;
    q.inequalities.push_back(0.5 - Expression::variable(0));  // x >= 0.5
    const NlpResult r = nlp::polish_round(q, {0.5, 1e-7}, 1e-5, {});
    CHECK(r.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("stationarity at reported optima") {
  // Known KKT point: min x^2 + z^2 st x + z = 1 -> (0.5, 0.5)
  MinlpProblem p;
  p.variables = {{"x", VarKind::Continuous, -5.0, 5.0}, {"z", VarKind::Continuous, -5.0, 5.0}};
  p.objective = pow(v(0), 2.0) + pow(v(1), 2.0);
  p.equalities.push_back(v(0) + v(1) - 1.0);
  NlpOptions opts;
  const NlpResult r = nlp::solve_nlp(p, {4.0, -4.0}, opts);
  REQUIRE(r.status == SolveStatus::Optimal);
  // distance to the unique KKT point bounded by the optimality tolerance scale
  CHECK(std::abs(r.point[0] - 0.5) <= 1e-4);
  CHECK(std::abs(r.point[1] - 0.5) <= 1e-4);
  CHECK(r.violation <= opts.feasibility_tolerance);
}
