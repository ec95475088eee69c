/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcbb/bench.hpp"
#include "hcbb/bnb.hpp"
#include "hcbb/parser.hpp"

namespace {

using namespace hcbb;

struct CommonOpts {
  std::string algorithm = "hcbb-rb";
  std::string output = "table";
  std::string start = "midpoint";
  double dt_min = 0.01;
  double delta_match = 0.1;
  double int_tol = 1e-5;
  int max_steps = 50;
  long node_limit = 10000;
  double time_limit = 3600.0;
};

void add_knobs(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--dt-min", o.dt_min, "Minimum homotopy step length")
      ->check(CLI::Range(1e-16, 0.999999));
  cmd->add_option("--delta-match", o.delta_match, "Schedule match window on the starting fraction")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--int-tol", o.int_tol, "Integrality tolerance")
      ->check(CLI::Range(1e-12, 0.499));
  cmd->add_option("--max-steps", o.max_steps, "Homotopy iteration cap per node")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--node-limit", o.node_limit, "Node cap")->check(CLI::PositiveNumber);
  cmd->add_option("--time-limit", o.time_limit, "Wall clock cap in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--output", o.output, "Output format")
      ->check(CLI::IsMember({"table", "json"}));
}

bnb::BnbOptions to_bnb_options(const CommonOpts& o) {
  bnb::BnbOptions opts;
  opts.hc_dt_min = o.dt_min;
  opts.delta_match = o.delta_match;
  opts.epsilon_int = o.int_tol;
  opts.hc_max_steps = o.max_steps;
  opts.node_limit = o.node_limit;
  opts.time_limit = o.time_limit;
  return opts;
}

model::Point make_start(const model::MinlpProblem& prob, const std::string& strategy) {
  if (strategy == "midpoint") return prob.midpoint();
  if (strategy.rfind("random:", 0) == 0) {
    bench::Rng rng(std::stoull(strategy.substr(7)));
    model::Point p(prob.num_vars());
    for (int i = 0; i < prob.num_vars(); ++i)
      p[i] = rng.uniform(prob.variables[i].lower, prob.variables[i].upper);
    return p;
  }
  if (strategy.rfind("file:", 0) == 0) {
    std::ifstream in(strategy.substr(5));
    if (!in) throw std::runtime_error("cannot open start file " + strategy.substr(5));
    model::Point p;
    double v = 0.0;
    while (in >> v) p.push_back(v);
    if (static_cast<int>(p.size()) != prob.num_vars())
      throw std::runtime_error("start file has " + std::to_string(p.size()) +
                               " values, expected " + std::to_string(prob.num_vars()));
    return p;
  }
  throw std::runtime_error("unknown start strategy '" + strategy +
                           "' (use midpoint, random:<seed> or file:<path>)");
}

void print_solve_table(const bnb::SolveReport& rep) {
  std::printf("algorithm    : %s\n", bnb::algorithm_name(rep.algorithm));
  std::printf("status       : %s\n", bnb::solve_status_name(rep.status));
  if (rep.incumbent) {
    std::printf("objective    : %.10g\n", rep.incumbent->objective);
    std::printf("point        :");
    for (double v : rep.incumbent->point) std::printf(" %.10g", v);
    std::printf("\n");
  } else {
    std::printf("objective    : none\n");
  }
  std::printf("n_node       : %ld\n", rep.n_node);
  std::printf("n_inf        : %ld\n", rep.n_inf);
  std::printf("n_nlp        : %ld\n", rep.n_nlp);
  std::printf("t_post (s)   : %.3f\n", rep.t_post);
  std::printf("n_inf_post   : %ld\n", rep.n_inf_post);
  std::printf("wall (s)     : %.3f\n", rep.wall_seconds);
  if (rep.polished_objective)
    std::printf("polish       : %.10g (relative change %.3g)\n", *rep.polished_objective,
                *rep.polish_rel_change);
}

int run_solve(const std::string& path, const CommonOpts& o) {
  model::MinlpProblem prob = model::parse_problem_file(path);
  auto algorithm = bnb::algorithm_from_name(o.algorithm);
  if (!algorithm) {
    std::cerr << "unknown algorithm '" << o.algorithm << "'\n";
    return 2;
  }
  bnb::SolveReport rep;
  try {
    rep = bnb::solve_minlp(prob, *algorithm, make_start(prob, o.start), to_bnb_options(o));
  } catch (const RootFailure& e) {
    std::cerr << "root failure: " << e.what() << "\n";
    return 1;
  }
  if (o.output == "json")
    std::cout << rep.to_json(2) << "\n";
  else
    print_solve_table(rep);
  return rep.status == bnb::SolveStatus::Optimal ? 0 : 1;
}

int run_oracle(const std::string& path, int multistarts, const CommonOpts& o) {
  model::MinlpProblem prob = model::parse_problem_file(path);
  nlp::NlpOptions nopts;
  bench::OracleResult res = bench::brute_force_solve(prob, multistarts, nopts);
  if (o.output == "json") {
    std::cout << res.to_json(2) << "\n";
  } else if (res.objective) {
    std::printf("objective  : %.10g\n", *res.objective);
    std::printf("assignment :");
    for (int b : res.assignment) std::printf(" %d", b);
    std::printf("\nn_nlp      : %ld\n", res.nlp_solves);
  } else {
    std::printf("objective  : none (every assignment infeasible)\n");
    std::printf("n_nlp      : %ld\n", res.nlp_solves);
  }
  return res.objective ? 0 : 1;
}

int run_bench(const std::string& suite, int count, const std::string& algorithms, int multistarts,
              int starts, int jobs, const CommonOpts& o) {
  std::vector<bnb::Algorithm> algos;
  std::stringstream ss(algorithms);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto a = bnb::algorithm_from_name(tok);
    if (!a) {
      std::cerr << "unknown algorithm '" << tok << "'\n";
      return 2;
    }
    algos.push_back(*a);
  }
  bench::BenchOptions bopts;
  bopts.multistarts = multistarts;
  bopts.start_count = starts;
  bopts.bnb = to_bnb_options(o);
  bopts.jobs = jobs;
  bench::BenchmarkReport rep = bench::run_benchmark(bench::make_suite(suite, count), algos, bopts);
  if (o.output == "json")
    std::cout << rep.to_json(2) << "\n";
  else
    std::cout << rep.to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MINLP solver toolkit: branch and bound with homotopy-continuation node solves"};
  app.require_subcommand(1);

  CommonOpts solve_opts, oracle_opts, bench_opts;
  std::string solve_file, oracle_file;
  std::string suite = "all", bench_algorithms = "bb,hcbb-fp,hcbb-rb";
  int oracle_multistarts = 5, bench_multistarts = 5, bench_count = 5, bench_starts = 1, jobs = 1;

  CLI::App* solve = app.add_subcommand("solve", "Solve a problem file");
  solve->add_option("file", solve_file, "Problem file")->required();
  solve->add_option("--algorithm", solve_opts.algorithm, "bb | hcbb-fp | hcbb-rb")
      ->check(CLI::IsMember({"bb", "hcbb-fp", "hcbb-rb"}));
  solve->add_option("--start", solve_opts.start, "midpoint | random:<seed> | file:<path>");
  add_knobs(solve, solve_opts);

  CLI::App* oracle = app.add_subcommand("oracle", "Enumerate binary assignments exhaustively");
  oracle->add_option("file", oracle_file, "Problem file")->required();
  oracle->add_option("--multistarts", oracle_multistarts, "Starts per assignment")
      ->check(CLI::Range(1, 64));
  oracle->add_option("--output", oracle_opts.output, "Output format")
      ->check(CLI::IsMember({"table", "json"}));

  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark suite against the oracle");
  bench->add_option("suite", suite, "worked | reactor | fold | convex | nonconvex | narrow | all");
  bench->add_option("--seeds", bench_count, "Seed count for generated families")
      ->check(CLI::Range(1, 1000));
  bench->add_option("--algorithm", bench_algorithms, "Comma-separated algorithm list");
  bench->add_option("--multistarts", bench_multistarts, "Oracle starts per assignment")
      ->check(CLI::Range(1, 64));
  bench->add_option("--starts", bench_starts, "Solver starts per (instance, algorithm) cell")
      ->check(CLI::Range(1, 64));
  bench->add_option("--jobs", jobs, "Parallel (instance, algorithm) cells")
      ->check(CLI::Range(1, 256));
  add_knobs(bench, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return run_solve(solve_file, solve_opts);
    if (oracle->parsed()) return run_oracle(oracle_file, oracle_multistarts, oracle_opts);
    if (bench->parsed())
      return run_bench(suite, bench_count, bench_algorithms, bench_multistarts, bench_starts, jobs,
                       bench_opts);
  } catch (const ParseError& e) {
    std::cerr << "parse error at line " << e.line() << ", column " << e.column() << ": "
              << e.what() << "\n";
    return 2;
  } catch (const SemanticError& e) {
    std::cerr << "semantic error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
