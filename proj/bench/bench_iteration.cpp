// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

// Serial vs OpenMP timing of the per-vertex Y projections and of whole
// iterations on a 256-vertex problem.
//
//   bench_iteration [repeats]

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "hinf/model.hpp"
#include "hinf/problem.hpp"
#include "hinf/solver.hpp"

using namespace hinf;

namespace {

template <class Fn>
double seconds_per_call(int repeats, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return dt.count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 20;
  if (repeats <= 0) {
    std::cerr << "usage: bench_iteration [repeats > 0]\n";
    return 2;
  }

  Matrix a(2, 2), b2(2, 2), c = Matrix::Zero(4, 2), d = Matrix::Zero(4, 2);
  a << 0.2229, 0.5637, 0.8708, 0.9984;
  b2 << 0.5254, 0.6644, 0.3872, 0.9145;
  c.topRows(2).setIdentity();
  d.bottomRows(2).setIdentity();
  const PlantModel plant(a, Matrix::Identity(2, 2), b2, c, d);
  const RelativeBounds bounds{Matrix::Constant(2, 2, 0.2),
                              Matrix::Constant(2, 2, 0.2)};
  const SchurData s =
      build_schur(build_extended(plant, enumerate_vertices(plant, bounds)));

  // Warm the state up so the projections see a non-trivial spectrum.
  SolverConfig cfg;
  cfg.sigma = 0.1;
  cfg.parallel_projections = false;
  SolverState st = init(s, cfg);
  for (int k = 0; k < 50; ++k) {
    st.y = update_y(st, s, cfg);
    const double mu_bar = backward_mu(st, s, cfg);
    st.w = update_w(st, s, cfg, mu_bar);
    st.mu = forward_mu(st, s, cfg, st.w);
    st.z = update_z(st, s, cfg);
  }

  auto full_iteration = [&](bool parallel) {
    SolverConfig c2 = cfg;
    c2.parallel_projections = parallel;
    SolverState t = st;
    t.y = update_y(t, s, c2);
    const double mu_bar = backward_mu(t, s, c2);
    t.w = update_w(t, s, c2, mu_bar);
    t.mu = forward_mu(t, s, c2, t.w);
    t.z = update_z(t, s, c2);
    residuals(t, s, parallel);
  };

  const double y_serial =
      seconds_per_call(repeats, [&] { update_y_serial(st, s, cfg.sigma); });
  const double y_parallel =
      seconds_per_call(repeats, [&] { update_y_parallel(st, s, cfg.sigma); });
  const double it_serial = seconds_per_call(repeats, [&] { full_iteration(false); });
  const double it_parallel = seconds_per_call(repeats, [&] { full_iteration(true); });

  std::cout << "vertices " << s.num_vertices() << ", threads "
            << omp_get_max_threads() << ", repeats " << repeats << '\n';
  std::cout << "update_y   serial " << y_serial * 1e3 << " ms  parallel "
            << y_parallel * 1e3 << " ms  speedup " << y_serial / y_parallel
            << '\n';
  std::cout << "iteration  serial " << it_serial * 1e3 << " ms  parallel "
            << it_parallel * 1e3 << " ms  speedup " << it_serial / it_parallel
            << '\n';
  return 0;
}
