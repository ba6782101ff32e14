// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

// hinfgc: robust H-infinity guaranteed-cost state feedback synthesis.
//
//   hinfgc solve     <problem.json> [--sigma F] [--tau F] [--eps F] ...
//   hinfgc verify    <problem.json> <gain.json>
//   hinfgc simulate  <problem.json> <gain.json> [--horizon F] [--dt F]
//   hinfgc sweep     <problem.json> <gain.json> [--fmin F] [--fmax F]
//   hinfgc enumerate <problem.json> [--full]

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "hinf/cli.hpp"

namespace {

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("HINF_GCC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring HINF_GCC_THREADS=" << env << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust H-infinity guaranteed-cost state feedback synthesis"};
  app.require_subcommand(1);

  hinf::cli::Options opt;
  int threads = 0;
  double sigma = 0.0, tau = 0.0, eps = 0.0;
  std::size_t max_iters = 0;
  std::size_t vertex = 0;
  bool serial = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("problem", opt.problem, "Problem file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--threads", threads,
                    "Worker threads (default: HINF_GCC_THREADS, then all cores)");
    sub->add_option("--out", opt.out, "Output path (default: stdout)");
  };
  auto add_gain = [&](CLI::App* sub) {
    sub->add_option("gain", opt.gain, "Gain file: {K} or {K, W, mu} or a solve report")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_vertex = [&](CLI::App* sub) {
    return sub->add_option("--vertex", vertex,
                           "Vertex index (default: nominal plant)");
  };

  auto* solve = app.add_subcommand("solve", "Synthesize K and gamma");
  add_common(solve);
  auto* o_sigma = solve->add_option("--sigma", sigma, "Penalty parameter");
  auto* o_tau = solve->add_option("--tau", tau, "Dual step length");
  auto* o_eps = solve->add_option("--eps", eps, "Stopping tolerance");
  auto* o_iters = solve->add_option("--max-iters", max_iters, "Iteration limit");
  solve->add_flag("--serial", serial, "Disable parallel vertex projections");
  solve->add_option("--history", opt.history, "Residual history CSV");
  solve->add_option("--fmin", opt.fmin, "Lowest sweep frequency (rad/s)");
  solve->add_option("--fmax", opt.fmax, "Highest sweep frequency (rad/s)");
  solve->add_option("--npts", opt.npts, "Sweep grid points");

  auto* verify = app.add_subcommand("verify", "Check stability, feasibility and norm bound");
  add_common(verify);
  add_gain(verify);
  verify->add_option("--fmin", opt.fmin, "Lowest sweep frequency (rad/s)");
  verify->add_option("--fmax", opt.fmax, "Highest sweep frequency (rad/s)");
  verify->add_option("--npts", opt.npts, "Sweep grid points");

  auto* simulate = app.add_subcommand("simulate", "Impulse responses, one CSV per channel");
  add_common(simulate);
  add_gain(simulate);
  simulate->add_option("--horizon", opt.horizon, "Simulated time (s)");
  simulate->add_option("--dt", opt.dt, "Step size (s)");
  auto* o_sim_vertex = add_vertex(simulate);

  auto* sweep = app.add_subcommand("sweep", "Singular-value sweep CSV");
  add_common(sweep);
  add_gain(sweep);
  sweep->add_option("--fmin", opt.fmin, "Lowest frequency (rad/s)");
  sweep->add_option("--fmax", opt.fmax, "Highest frequency (rad/s)");
  sweep->add_option("--npts", opt.npts, "Grid points");
  auto* o_sweep_vertex = add_vertex(sweep);

  auto* enumerate = app.add_subcommand("enumerate", "List the uncertainty vertices");
  add_common(enumerate);
  enumerate->add_flag("--full", opt.full, "Print every vertex (A, B2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hinf::cli::kExitSchema;
  }

  if (o_sigma->count()) opt.solver.sigma = sigma;
  if (o_tau->count()) opt.solver.tau = tau;
  if (o_eps->count()) opt.solver.eps = eps;
  if (o_iters->count()) opt.solver.max_iters = max_iters;
  if (serial) opt.solver.parallel = false;
  if (o_sim_vertex->count() || o_sweep_vertex->count()) opt.vertex = vertex;

  if (const int n = thread_count(threads); n > 0) omp_set_num_threads(n);

  if (solve->parsed()) return hinf::cli::cmd_solve(opt, std::cout, std::cerr);
  if (verify->parsed()) return hinf::cli::cmd_verify(opt, std::cout, std::cerr);
  if (simulate->parsed()) return hinf::cli::cmd_simulate(opt, std::cout, std::cerr);
  if (sweep->parsed()) return hinf::cli::cmd_sweep(opt, std::cout, std::cerr);
  return hinf::cli::cmd_enumerate(opt, std::cout, std::cerr);
}
