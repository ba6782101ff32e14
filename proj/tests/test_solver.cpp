// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hinf/errors.hpp"
#include "hinf/solver.hpp"
#include "hinf/verify.hpp"
#include "oracles.hpp"
#include "reference_plants.hpp"

using namespace hinf;

namespace {

struct Fixture {
  PlantModel plant;
  std::vector<Vertex> vertices;
  ExtendedMatrices e;
  SchurData s;
  oracle::Ops ops;

  Fixture(PlantModel p, std::vector<Vertex> v)
      : plant(std::move(p)),
        vertices(std::move(v)),
        e(build_extended(plant, enumerate_vertices(plant, vertices))),
        s(build_schur(e)),
        ops(oracle::build_ops(plant, vertices)) {}
};

Fixture random_fixture(std::mt19937& rng) {
  PlantModel p = ref::random_plant(rng, 2, 1);
  auto v = ref::random_vertices(rng, p, 4);
  return Fixture(std::move(p), std::move(v));
}

Fixture scalar_fixture() {
  PlantModel p = ref::scalar_plant();
  std::vector<Vertex> v{{p.A(), p.B2()}};
  return Fixture(std::move(p), std::move(v));
}

ConsensusVector random_blocks(std::mt19937& rng, const SchurData& s,
                              double scale) {
  ConsensusVector c;
  c.y0 = SymMatrix(ref::random_sym(rng, s.p, scale));
  for (std::size_t i = 0; i < s.num_vertices(); ++i) {
    c.yi.push_back(SymMatrix(ref::random_sym(rng, s.r, scale)));
  }
  c.last = ref::random_matrix(rng, 1, 1, scale)(0, 0);
  return c;
}

oracle::Blocks to_blocks(const ConsensusVector& c) {
  oracle::Blocks b;
  b.b0 = c.y0.matrix();
  for (const auto& m : c.yi) b.bi.push_back(m.matrix());
  b.last = c.last;
  return b;
}

SolverState random_state(std::mt19937& rng, const SchurData& s) {
  SolverState st;
  st.w = SymMatrix(ref::random_sym(rng, s.p));
  st.mu = ref::random_matrix(rng, 1, 1)(0, 0);
  st.y = random_blocks(rng, s, 1.0);
  st.z = random_blocks(rng, s, 1.0);
  return st;
}

// Central difference of 𝓛_σ in μ.
double dl_dmu(const Fixture& f, const SolverState& st, const Matrix& w,
              double mu, double sigma) {
  const auto y = to_blocks(st.y);
  const auto z = to_blocks(st.z);
  const double h = 1e-6 * (1 + std::abs(mu));
  return (oracle::lagrangian(f.ops, y, w, mu + h, z, sigma) -
          oracle::lagrangian(f.ops, y, w, mu - h, z, sigma)) /
         (2 * h);
}

// Largest central-difference derivative of 𝓛_σ along symmetric unit
// directions (Eᵢⱼ + Eⱼᵢ)/2.
double max_dl_dw(const Fixture& f, const SolverState& st, const Matrix& w,
                 double mu, double sigma) {
  const auto y = to_blocks(st.y);
  const auto z = to_blocks(st.z);
  double worst = 0.0;
  const double h = 1e-6 * (1 + w.cwiseAbs().maxCoeff());
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j <= i; ++j) {
      Matrix d = Matrix::Zero(w.rows(), w.cols());
      d(i, j) += 0.5;
      d(j, i) += 0.5;
      const double g = (oracle::lagrangian(f.ops, y, w + h * d, mu, z, sigma) -
                        oracle::lagrangian(f.ops, y, w - h * d, mu, z, sigma)) /
                       (2 * h);
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

bool bitwise_equal(const ConsensusVector& a, const ConsensusVector& b) {
  if (a.yi.size() != b.yi.size() || a.last != b.last) return false;
  if (a.y0.matrix() != b.y0.matrix()) return false;
  for (std::size_t i = 0; i < a.yi.size(); ++i) {
    if (a.yi[i].matrix() != b.yi[i].matrix()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("SolverConfig validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.tau = 1.7;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.tau = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = SolverConfig{};
  c.sigma = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = SolverConfig{};
  c.eps = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = SolverConfig{};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("init") {
  std::mt19937 rng(31);
  const Fixture f = random_fixture(rng);
  const SolverState st = init(f.s, {});
  CHECK(st.k == 0);
  CHECK(st.mu == 0.0);
  CHECK(st.w.norm() == 0.0);
  CHECK(st.y.norm() == 0.0);
  CHECK(st.z.norm() == 0.0);
  CHECK(st.y.matches(f.s));

  const SolverState r = random_state(rng, f.s);
  const StartPoint sp{r.w, r.mu, r.y, r.z};
  const SolverState echoed = init(f.s, {}, sp);
  CHECK(echoed.w.matrix() == r.w.matrix());
  CHECK(echoed.mu == r.mu);
  CHECK(bitwise_equal(echoed.y, r.y));
  CHECK(bitwise_equal(echoed.z, r.z));

  StartPoint bad = sp;
  bad.z.yi.pop_back();
  CHECK_THROWS_AS(init(f.s, {}, bad), InvalidInput);
  bad = sp;
  bad.w = SymMatrix::zero(2);
  CHECK_THROWS_AS(init(f.s, {}, bad), InvalidInput);
}

TEST_CASE("update_y") {
  std::mt19937 rng(32);
  const Fixture f = random_fixture(rng);
  SolverConfig cfg;
  SolverState st = init(f.s, cfg);

  ConsensusVector y = update_y(st, f.s, cfg);
  CHECK(y.y0.norm() == 0.0);
  st.mu = 1.0;
  CHECK(update_y(st, f.s, cfg).last == 1.0);
  st.mu = -1.0;
  CHECK(update_y(st, f.s, cfg).last == 0.0);

  for (int t = 0; t < 20; ++t) {
    st = random_state(rng, f.s);
    y = update_y(st, f.s, cfg);
    CHECK((project_psd(y.y0) - y.y0).norm() <= 1e-10);
    CHECK(min_eig(y.y0) >= -1e-10);
    for (const auto& b : y.yi) {
      CHECK((project_psd(b) - b).norm() <= 1e-10);
      CHECK(min_eig(b) >= -1e-10);
    }
    CHECK(y.last >= 0.0);
    // Each block is the projection of its own argument.
    const SymMatrix g0 = eval_g(f.s, 0, st.w, st.mu);
    const SymMatrix expect =
        project_psd(SymMatrix(g0.matrix() - st.z.yi[0].matrix() / cfg.sigma));
    CHECK((y.yi[0] - expect).norm() <= 1e-12);
  }
}

TEST_CASE("parallel and serial projections agree bitwise") {
  const PlantModel p = ref::two_state_plant();
  const ExtendedMatrices e =
      build_extended(p, enumerate_vertices(p, ref::two_state_bounds()));
  const SchurData s = build_schur(e);
  std::mt19937 rng(33);
  for (int t = 0; t < 3; ++t) {
    const SolverState st = random_state(rng, s);
    CHECK(bitwise_equal(update_y_serial(st, s, 0.3), update_y_parallel(st, s, 0.3)));
    SolverConfig serial, parallel;
    serial.parallel_projections = false;
    parallel.parallel_projections = true;
    CHECK(backward_mu(st, s, serial) == backward_mu(st, s, parallel));
    CHECK(update_w(st, s, serial, 0.7).matrix() == update_w(st, s, parallel, 0.7).matrix());
    CHECK(bitwise_equal(update_z(st, s, serial), update_z(st, s, parallel)));
    const Residuals a = residuals(st, s, false);
    const Residuals b = residuals(st, s, true);
    CHECK(a.err == b.err);
    CHECK(a.err_w == b.err_w);
    CHECK(a.err_y == b.err_y);
  }
}

TEST_CASE("backward and forward sweeps") {
  SUBCASE("zero state, first iteration") {
    std::mt19937 rng(34);
    const Fixture f = random_fixture(rng);
    SolverConfig cfg;
    cfg.sigma = 0.5;
    SolverState st = init(f.s, cfg);
    st.y = update_y(st, f.s, cfg);
    const double n = static_cast<double>(f.s.num_vertices());
    const double expect = 1.0 / (cfg.sigma * (n * f.s.tr_h3_sq + 1.0));
    const double mu_bar = backward_mu(st, f.s, cfg);
    CHECK(mu_bar == doctest::Approx(expect).epsilon(1e-14));
    CHECK(forward_mu(st, f.s, cfg, st.w) == mu_bar);
  }
  SUBCASE("H3 = 0 reduces to the scalar quadratic") {
    const Matrix one = Matrix::Identity(1, 1);
    Matrix c(2, 1), d(2, 1);
    c << 1, 0;
    d << 0, 1;
    const Fixture f(PlantModel(-one, Matrix::Zero(1, 1), one, c, d),
                    {{-one, one}});
    CHECK(f.s.tr_h3_sq == 0.0);
    std::mt19937 rng(35);
    SolverState st = random_state(rng, f.s);
    SolverConfig cfg;
    cfg.sigma = 2.0;
    // 𝓛 in μ: −μ + Z(Y − μ) + (σ/2)(Y − μ)² → μ = (1 + σY + Z)/σ.
    const double expect = (1.0 + cfg.sigma * st.y.last + st.z.last) / cfg.sigma;
    CHECK(backward_mu(st, f.s, cfg) == doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("stationarity by finite differences") {
    std::mt19937 rng(36);
    const Fixture f = random_fixture(rng);
    for (double sigma : {0.1, 1.0, 3.0}) {
      SolverConfig cfg;
      cfg.sigma = sigma;
      for (int t = 0; t < 10; ++t) {
        const SolverState st = random_state(rng, f.s);
        const double mu_bar = backward_mu(st, f.s, cfg);
        CHECK(std::abs(dl_dmu(f, st, st.w.matrix(), mu_bar, sigma)) <=
              1e-6 * (1 + std::abs(mu_bar)));
        const SymMatrix w_new = update_w(st, f.s, cfg, mu_bar);
        CHECK(max_dl_dw(f, st, w_new.matrix(), mu_bar, sigma) <= 1e-5);
        const double mu_new = forward_mu(st, f.s, cfg, w_new);
        CHECK(std::abs(dl_dmu(f, st, w_new.matrix(), mu_new, sigma)) <=
              1e-6 * (1 + std::abs(mu_new)));
      }
    }
  }
}

TEST_CASE("update_w") {
  std::mt19937 rng(37);
  const Fixture f = random_fixture(rng);
  SolverConfig cfg;
  cfg.sigma = 0.7;
  const double mu_bar = 0.4;
  // Y₀ = 0, Z = 0 and Yᵢ = μ̄H₃ + H₀ make T₀ vanish.
  SolverState st = init(f.s, cfg);
  for (auto& b : st.y.yi) b = SymMatrix(mu_bar * f.s.H3.matrix() + f.s.H0.matrix());
  CHECK(update_w(st, f.s, cfg, mu_bar).norm() <= 1e-14);

  // Remaining T₀ = −Y₀ − Z₀/σ, and the result solves the Kronecker system.
  st.y.y0 = SymMatrix(ref::random_sym(rng, f.s.p));
  st.z.y0 = SymMatrix(ref::random_sym(rng, f.s.p));
  const Matrix t0 = -st.y.y0.matrix() - st.z.y0.matrix() / cfg.sigma;
  const SymMatrix w = update_w(st, f.s, cfg, mu_bar);
  const Vector resid = f.s.wsolve_matrix.matrix() * vec(w.matrix()) + vec(t0);
  CHECK(resid.norm() <= 1e-10 * (1 + t0.norm()));
}

TEST_CASE("update_z") {
  std::mt19937 rng(38);
  const Fixture f = random_fixture(rng);
  SolverConfig cfg;
  SolverState st = random_state(rng, f.s);
  st.y = apply_h(f.s, st.w, st.mu);
  const ConsensusVector same = update_z(st, f.s, cfg);
  CHECK(bitwise_equal(same, st.z));

  cfg.sigma = 2.0;
  cfg.tau = 0.5;
  st = random_state(rng, f.s);
  st.z = ConsensusVector::zero(f.s);
  const ConsensusVector z = update_z(st, f.s, cfg);
  const ConsensusVector h = apply_h(f.s, st.w, st.mu);
  CHECK((z.y0 - (st.y.y0 - h.y0)).norm() <= 1e-14);
  for (std::size_t i = 0; i < z.yi.size(); ++i) {
    CHECK((z.yi[i] - (st.y.yi[i] - h.yi[i])).norm() <= 1e-13);
    CHECK((z.yi[i].matrix() - z.yi[i].matrix().transpose()).norm() == 0.0);
  }
  CHECK(z.last == doctest::Approx(st.y.last - st.mu));
}

TEST_CASE("residuals") {
  const Fixture f = scalar_fixture();
  SolverState st = init(f.s, {});
  Residuals r = residuals(st, f.s);
  CHECK(r.err_mu == 0.5);
  CHECK(r.err_w == 0.0);
  CHECK(r.err_y == 0.0);
  // Yᵢ = 0 against 𝒢ᵢ(0, 0) = H₀ with ‖H₀‖ = √2.
  CHECK(r.err_eq == doctest::Approx(std::sqrt(2.0) / (1.0 + std::sqrt(2.0))));
  CHECK(r.err == r.err_eq);

  // A strictly feasible point with Y = ℋ(W, μ) and Z = 0.
  Matrix w(2, 2);
  w << 1, 1, 1, 3;
  st.w = SymMatrix(w);
  st.mu = 1.0;
  CHECK(max_eig(eval_theta1(f.e, 0, st.w, st.mu)) < 0.0);
  st.y = apply_h(f.s, st.w, st.mu);
  r = residuals(st, f.s);
  CHECK(r.err_eq <= 1e-15);
  CHECK(r.err_y <= 1e-14);
  CHECK(r.err == std::max({r.err_w, r.err_mu, r.err_y, r.err_eq}));
}

TEST_CASE("extract_gain") {
  Matrix w = Matrix::Zero(4, 4);
  w.topLeftCorner(3, 3) = Matrix::Identity(3, 3) * 2.0;
  w(3, 3) = 1.0;
  CHECK(extract_gain(SymMatrix(w), 3, 1).isZero());

  const Matrix k = extract_gain(ref::aircraft_published_w(), 3, 1);
  for (int j = 0; j < 3; ++j) {
    CHECK(k(0, j) == doctest::Approx(ref::kAircraftK[j]).epsilon(2e-3));
  }

  Matrix w2(4, 4);
  w2 << 0.1608, 0.0058, 0.1673, 0.0665, 0.0058, 0.0129, 0.0327, 0.0744, 0.1673,
      0.0327, 0.6892, 0.2970, 0.0665, 0.0744, 0.2970, 1.2701;
  const Matrix k2 = extract_gain(SymMatrix(w2), 2, 2);
  const Matrix k2_ref = ref::two_state_published_k();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(k2(i, j) == doctest::Approx(k2_ref(i, j)).epsilon(1e-2));

  Matrix sing = Matrix::Identity(3, 3);
  sing(0, 0) = 0.0;
  CHECK_THROWS_AS(extract_gain(SymMatrix(sing), 2, 1), ExtractionError);
  sing(0, 0) = 1e-13;
  CHECK_THROWS_AS(extract_gain(SymMatrix(sing), 2, 1), ExtractionError);
  CHECK_THROWS_AS(extract_gain(SymMatrix(sing), 3, 1), InvalidInput);
}

TEST_CASE("solve on the scalar plant") {
  const Fixture f = scalar_fixture();
  SolverConfig cfg;
  cfg.eps = 1e-6;
  cfg.parallel_projections = false;

  std::size_t observed = 0;
  bool cones_ok = true;
  const Solution sol = solve(f.s, cfg, std::nullopt, [&](const SolverState& st) {
    ++observed;
    cones_ok = cones_ok && min_eig(st.y.y0) >= -1e-10 && st.y.last >= 0.0;
    for (const auto& b : st.y.yi) cones_ok = cones_ok && min_eig(b) >= -1e-10;
  });
  REQUIRE(sol.status == SolveStatus::converged);
  CHECK(cones_ok);
  CHECK(observed == sol.iters);
  REQUIRE(sol.history.size() == sol.iters + 1);
  CHECK(sol.history.front().k == 0);
  CHECK(sol.history.front().err_mu == 0.5);
  CHECK(sol.history.back().err < cfg.eps);
  CHECK(sol.history.back().k == sol.iters);

  REQUIRE(sol.gamma_star);
  REQUIRE(sol.k_star);
  CHECK(*sol.gamma_star == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
  CHECK((*sol.k_star)(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(*sol.gamma_star == doctest::Approx(1.0 / std::sqrt(sol.mu_star)).epsilon(1e-12));

  // Final iterate nearly feasible, and the certified bound holds.
  const FeasibilityReport feas =
      check_feasibility(f.e, sol.w_star, sol.mu_star, 10 * cfg.eps);
  CHECK(feas.all_pass());
  CHECK(feas.min_eig_w >= -10 * cfg.eps);
  const ClosedLoop cl = closed_loop(f.plant, f.vertices[0], 0, *sol.k_star);
  CHECK(hinf_sweep(cl).peak <= *sol.gamma_star * (1 + 1e-2));

  SUBCASE("deterministic") {
    const Solution again = solve(f.s, cfg);
    REQUIRE(again.history.size() == sol.history.size());
    for (std::size_t k = 0; k < sol.history.size(); ++k) {
      CHECK(again.history[k].err == sol.history[k].err);
      CHECK(again.history[k].mu == sol.history[k].mu);
    }
    SolverConfig par = cfg;
    par.parallel_projections = true;
    const Solution p = solve(f.s, par);
    CHECK(p.w_star.matrix() == sol.w_star.matrix());
  }
}

TEST_CASE("solve stops at max_iters") {
  const Fixture f = scalar_fixture();
  SolverConfig cfg;
  cfg.max_iters = 3;
  const Solution sol = solve(f.s, cfg);
  CHECK(sol.status == SolveStatus::max_iters);
  CHECK(sol.iters == 3);
  CHECK(sol.history.size() == 4);
  CHECK_FALSE(sol.message.empty());
  CHECK(std::string(to_string(sol.status)) == "max-iters");
}

TEST_CASE("solve on a random multi-vertex problem") {
  std::mt19937 rng(39);
  PlantModel p = ref::random_plant(rng, 2, 1);
  auto v = ref::random_vertices(rng, p, 3);
  const Fixture f(std::move(p), std::move(v));
  SolverConfig cfg;
  cfg.sigma = 0.1;  // σ = 1 needs well over 10⁵ iterations here
  cfg.eps = 1e-6;
  const Solution sol = solve(f.s, cfg);
  REQUIRE(sol.status == SolveStatus::converged);
  REQUIRE(sol.k_star);
  for (std::size_t i = 0; i < f.vertices.size(); ++i) {
    const ClosedLoop cl = closed_loop(f.plant, f.vertices[i], i, *sol.k_star);
    CHECK(stability_margin(cl) < 0.0);
    CHECK(hinf_sweep(cl).peak <= *sol.gamma_star * (1 + 1e-2));
  }
}
