// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hinf/errors.hpp"
#include "hinf/solver.hpp"
#include "hinf/verify.hpp"
#include "oracles.hpp"
#include "reference_plants.hpp"

using namespace hinf;

namespace {

ClosedLoop diag_loop(Index n) {
  ClosedLoop cl;
  cl.Ac = -Matrix::Identity(n, n);
  cl.B1 = Matrix::Identity(n, n);
  cl.Cc = Matrix::Identity(n, n);
  return cl;
}

Matrix aircraft_k() {
  Matrix k(1, 3);
  k << ref::kAircraftK[0], ref::kAircraftK[1], ref::kAircraftK[2];
  return k;
}

ClosedLoop random_stable_loop(std::mt19937& rng, Index n) {
  ClosedLoop cl;
  Matrix a = ref::random_matrix(rng, n, n);
  double shift = 0.0;
  for (const auto& l : eig_general(a)) shift = std::max(shift, l.real());
  cl.Ac = a - (shift + 0.5) * Matrix::Identity(n, n);
  cl.B1 = ref::random_matrix(rng, n, 2);
  cl.Cc = ref::random_matrix(rng, 3, n);
  return cl;
}

}  // namespace

TEST_CASE("closed_loop") {
  const PlantModel p = ref::aircraft_plant();
  const Vertex nominal{p.A(), p.B2()};
  ClosedLoop cl = closed_loop(p, nominal, 0, Matrix::Zero(1, 3));
  CHECK(cl.Ac == p.A());
  CHECK(cl.Cc == p.C());

  cl = closed_loop(p, nominal, 0, aircraft_k());
  CHECK(stability_margin(cl) < 0.0);
  CHECK_THROWS_AS(closed_loop(p, nominal, 0, Matrix::Zero(3, 1)), InvalidInput);

  const PlantModel s = ref::scalar_plant();
  cl = closed_loop(s, {s.A(), s.B2()}, 0, Matrix::Constant(1, 1, 1.0));
  CHECK(cl.Ac(0, 0) == -2.0);
}

TEST_CASE("stability_margin") {
  CHECK(stability_margin(diag_loop(3)) == doctest::Approx(-1.0));
  ClosedLoop rot = diag_loop(2);
  rot.Ac << 0, 1, -1, 0;
  CHECK(std::abs(stability_margin(rot)) < 1e-14);

  // Open loop of the two-state plant is unstable.
  const PlantModel p = ref::two_state_plant();
  const ClosedLoop open = closed_loop(p, {p.A(), p.B2()}, 0, Matrix::Zero(2, 2));
  CHECK(stability_margin(open) > 0.0);

  // Published gain stabilizes every vertex of the ±20% box.
  const VertexSet vs = enumerate_vertices(p, ref::two_state_bounds());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const ClosedLoop cl = closed_loop(p, vs.vertices[i], i, ref::two_state_published_k());
    CHECK(stability_margin(cl) < 0.0);
  }
}

TEST_CASE("hinf_sweep") {
  SUBCASE("first-order lag") {
    const ClosedLoop cl = diag_loop(2);
    const SweepResult s = hinf_sweep(cl);
    REQUIRE(s.frequencies.size() == kDefaultNpts);
    CHECK(s.frequencies.front() == doctest::Approx(1e-3));
    CHECK(s.frequencies.back() == doctest::Approx(1e4));
    for (std::size_t k = 0; k < s.frequencies.size(); k += 97) {
      const double w = s.frequencies[k];
      CHECK(s.sigma_max[k] == doctest::Approx(1.0 / std::sqrt(1.0 + w * w)).epsilon(1e-12));
    }
    CHECK(sigma_max_at(cl, 0.0) == doctest::Approx(1.0));
    CHECK(s.peak == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.warnings.empty());
  }
  SUBCASE("aircraft loop with the published gain") {
    const PlantModel p = ref::aircraft_plant();
    const ClosedLoop cl = closed_loop(p, {p.A(), p.B2()}, 0, aircraft_k());
    const SweepResult s = hinf_sweep(cl);
    CHECK(s.peak == doctest::Approx(ref::kAircraftPeak).epsilon(1e-3));
    CHECK(20 * std::log10(s.peak) == doctest::Approx(-6.43).epsilon(0.05 / 6.43));
  }
  SUBCASE("scalar plant at k = 1") {
    const PlantModel p = ref::scalar_plant();
    const ClosedLoop cl = closed_loop(p, {p.A(), p.B2()}, 0, Matrix::Constant(1, 1, 1.0));
    CHECK(hinf_sweep(cl).peak == doctest::Approx(oracle::scalar_hinf(1.0)).epsilon(1e-6));
  }
  SUBCASE("resonant peak is refined off the grid") {
    ClosedLoop cl;
    cl.Ac.resize(2, 2);
    const double wn = 3.7, zeta = 0.01;
    cl.Ac << 0, 1, -wn * wn, -2 * zeta * wn;
    cl.B1 = Matrix(2, 1);
    cl.B1 << 0, 1;
    cl.Cc = Matrix(1, 2);
    cl.Cc << wn * wn, 0;
    const SweepResult coarse = hinf_sweep(cl, 1e-3, 1e4, 50);
    const double exact = 1.0 / (2 * zeta * std::sqrt(1 - zeta * zeta));
    CHECK(coarse.peak == doctest::Approx(exact).epsilon(1e-6));
    CHECK(coarse.peak >= *std::max_element(coarse.sigma_max.begin(), coarse.sigma_max.end()));
  }
  SUBCASE("doubling the grid never lowers the peak") {
    std::mt19937 rng(41);
    for (int t = 0; t < 20; ++t) {
      const ClosedLoop cl = random_stable_loop(rng, 2 + t % 4);
      const double a = hinf_sweep(cl, 1e-3, 1e4, 500).peak;
      const double b = hinf_sweep(cl, 1e-3, 1e4, 1000).peak;
      CHECK(b >= a * (1 - 1e-6));
    }
  }
  SUBCASE("unstable and singular loops") {
    ClosedLoop cl = diag_loop(1);
    cl.Ac(0, 0) = 1.0;
    CHECK_FALSE(hinf_sweep(cl).warnings.empty());
    cl.Ac(0, 0) = 0.0;
    CHECK_THROWS_AS(sigma_max_at(cl, 0.0), SingularSystem);
    CHECK_THROWS_AS(hinf_sweep(cl, 1.0, 0.5, 10), InvalidInput);
    CHECK_THROWS_AS(hinf_sweep(cl, 1.0, 10.0, 1), InvalidInput);
  }
}

TEST_CASE("check_feasibility") {
  const PlantModel p = ref::aircraft_plant();
  const ExtendedMatrices e = build_extended(p, enumerate_vertices(p, no_uncertainty(p)));
  FeasibilityReport r = check_feasibility(e, SymMatrix::zero(4), 1.0, 1e-6);
  REQUIRE(r.vertices.size() == 1);
  CHECK(r.vertices[0].max_eig_theta == doctest::Approx(1.0));
  CHECK_FALSE(r.vertices[0].pass);
  CHECK_FALSE(r.all_pass());
  CHECK(r.mu_positive);

  r = check_feasibility(e, SymMatrix::zero(4), 0.0, 1e-6);
  CHECK(r.vertices[0].pass);
  CHECK_FALSE(r.all_pass());

  // The solver's scalar-plant answer certifies itself.
  const PlantModel s = ref::scalar_plant();
  const ExtendedMatrices es = build_extended(s, enumerate_vertices(s, no_uncertainty(s)));
  SolverConfig cfg;
  cfg.eps = 1e-7;
  const Solution sol = solve(build_schur(es), cfg);
  REQUIRE(sol.status == SolveStatus::converged);
  // Back off μ slightly so rounding at the boundary cannot flip the verdict.
  const FeasibilityReport ok = check_feasibility(es, sol.w_star, 0.999 * sol.mu_star, 1e-8);
  CHECK(ok.all_pass());
  CHECK(ok.min_eig_w > 0.0);
  const ClosedLoop cl = closed_loop(s, es.vertices[0], 0, *sol.k_star);
  CHECK(hinf_sweep(cl).peak <= (1.0 / std::sqrt(0.999 * sol.mu_star)) * (1 + 1e-2));
}

TEST_CASE("impulse_response") {
  SUBCASE("scalar exponential") {
    ClosedLoop cl = diag_loop(1);
    const auto tr = impulse_response(cl, 5.0, 1e-3);
    REQUIRE(tr.size() == 1);
    REQUIRE(tr[0].times.size() == 5001);
    CHECK(tr[0].times.back() == 5.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr[0].times.size(); ++k) {
      worst = std::max(worst, std::abs(tr[0].states[k](0) - std::exp(-tr[0].times[k])));
    }
    CHECK(worst <= 1e-6);
  }
  SUBCASE("channels are independent") {
    const auto tr = impulse_response(diag_loop(2), 2.0, 1e-2);
    REQUIRE(tr.size() == 2);
    for (std::size_t j = 0; j < 2; ++j) {
      const Vector& x = tr[j].states.back();
      CHECK(x(static_cast<Index>(j)) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
      CHECK(x(static_cast<Index>(1 - j)) == 0.0);
    }
  }
  SUBCASE("horizon not a multiple of dt") {
    const auto tr = impulse_response(diag_loop(1), 1.05, 0.1);
    CHECK(tr[0].times.size() == 12);
    CHECK(tr[0].times.back() == 1.05);
    CHECK(tr[0].states.back()(0) == doctest::Approx(std::exp(-1.05)).epsilon(1e-6));
  }
  SUBCASE("aircraft loop decays past the slowest mode") {
    const PlantModel p = ref::aircraft_plant();
    const ClosedLoop cl = closed_loop(p, {p.A(), p.B2()}, 0, aircraft_k());
    const double horizon = 12.0 / std::abs(stability_margin(cl));
    for (const auto& tr : impulse_response(cl, horizon, 1e-3)) {
      double peak = 0.0;
      for (const auto& x : tr.states) peak = std::max(peak, x.norm());
      CHECK(tr.states.back().norm() < 1e-3 * peak);
    }
  }
  SUBCASE("fourth-order convergence") {
    std::mt19937 rng(42);
    for (int t = 0; t < 10; ++t) {
      const ClosedLoop cl = random_stable_loop(rng, 3);
      const double dt = 0.05, horizon = 2.0;
      const auto coarse = impulse_response(cl, horizon, dt);
      const auto fine = impulse_response(cl, horizon, dt / 2);
      const auto refr = impulse_response(cl, horizon, dt / 8);
      auto err = [&](const std::vector<Trajectory>& tr, std::size_t stride) {
        double e = 0.0;
        for (std::size_t j = 0; j < tr.size(); ++j) {
          for (std::size_t k = 0; k < tr[j].times.size(); ++k) {
            e = std::max(e, (tr[j].states[k] - refr[j].states[k * stride]).norm());
          }
        }
        return e;
      };
      const double e1 = err(coarse, 8);
      const double e2 = err(fine, 4);
      CHECK(e1 / e2 >= 8.0);
    }
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(impulse_response(diag_loop(1), 1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(impulse_response(diag_loop(1), 0.0, 0.1), InvalidInput);
  }
}
