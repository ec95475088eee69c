/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hcbb/bnb.hpp"
#include "hcbb/nlp.hpp"
#include "hcbb/problem.hpp"

namespace hcbb::bench {

// Deterministic generator helpers on top of mt19937_64; distribution
// mapping is written out so instances are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(state_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }
  int int_in(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }
  bool coin() { return uniform() < 0.5; }

 private:
  std::mt19937_64 state_;
};

// Low-discrepancy multistart pattern: the box midpoint followed by Halton
// points (one prime base per dimension) scaled into the box.
std::vector<model::Point> multistart_points(const model::MinlpProblem& prob, int count);

struct OracleResult {
  std::optional<double> objective;
  std::vector<int> assignment;  // binary values of the best assignment
  model::Point point;
  std::vector<nlp::SolveStatus> statuses;                    // per assignment
  std::vector<std::optional<double>> assignment_objectives;  // per assignment
  long nlp_solves = 0;

  std::string to_json(int indent = -1) const;
};

// Enumerates all 2^m binary assignments (m <= 16), solving each fixed NLP
// from `multistarts` spread-out starts, and returns the best feasible
// result. Serves as desk-scale ground truth.
OracleResult brute_force_solve(const model::MinlpProblem& prob, int multistarts,
                               const nlp::NlpOptions& opts);

enum class Family { ConvexQp, NonconvexPoly, NarrowChannel };

// Deterministic per seed. ConvexQp: positive-definite quadratic objective
// with affine constraints, at least one feasible assignment by
// construction. NonconvexPoly: quartic wells plus bilinear couplings.
// NarrowChannel: an equality whose solution branch travels with the
// relaxed binary while a spurious violation minimum forms near the
// parent's warm start, so direct child solves fail where the gradual walk
// succeeds.
model::MinlpProblem generate_instance(std::uint64_t seed, int n, int m, Family family);

// min (x-0.6)^2 + 0.5 y  s.t.  x - y <= 0, x in [0,1], y binary.
// Optimum 0.36 at y=0, x=0.
model::MinlpProblem worked_instance();

// Three-stage CSTR series for a first-order A -> B -> C system
// (k1 = 0.412 1/h, k2 = 0.055 1/h): binary existence per stage, residence
// times and compositions as continuous variables, a minimum yield of B at
// the outlet, and a fixed-charge-plus-volume cost.
model::MinlpProblem reactor_network_instance(double conversion_target = 0.5);

// Instance whose y=0 child loses feasibility below a fractional threshold:
// the walk stalls there with a recorded objective above the eventual
// incumbent, so the revisit pass can discard it by bound alone.
model::MinlpProblem fold_instance();

// Instance solvable at a child node by exactly the attempt sequence
// t = 1 (fail), 0.5, 1; see the homotopy tests.
model::MinlpProblem two_step_channel_instance();
// Anchor and warm start matching that node.
homotopy::HomotopyAnchor two_step_channel_anchor();
model::Point two_step_channel_parent_point();

struct BenchInstance {
  std::string name;
  model::MinlpProblem problem;
};

struct BenchOptions {
  int multistarts = 5;   // oracle starts per assignment
  int start_count = 1;   // solver starts per (instance, algorithm) cell
  bnb::BnbOptions bnb;
  int jobs = 1;
};

struct BenchmarkRow {
  std::string instance;
  std::string algorithm;
  int start_index = 0;
  bnb::SolveStatus status = bnb::SolveStatus::Infeasible;
  std::optional<double> objective;
  long n_node = 0;
  long n_inf = 0;
  long n_nlp = 0;
  double t_post = 0.0;
  long n_inf_post = 0;
  double wall_seconds = 0.0;
  std::optional<double> oracle_objective;
  bool matches_oracle = false;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::string to_text() const;
  std::string to_json(int indent = -1) const;
};

// Named suites: "worked", "reactor", "convex", "nonconvex", "narrow",
// "fold", or "all". `count` seeds the generated families.
std::vector<BenchInstance> make_suite(const std::string& name, int count);

// Runs every algorithm on every instance from every configured start
// point (the box midpoint followed by spread-out points), compares each
// run against the enumeration oracle, and collects the statistics table.
BenchmarkReport run_benchmark(const std::vector<BenchInstance>& instances,
                              const std::vector<bnb::Algorithm>& algorithms,
                              const BenchOptions& opts);

}  // namespace hcbb::bench
