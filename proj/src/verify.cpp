// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/LU>
#include <fmt/format.h>

#include "hinf/errors.hpp"
#include "parallel.hpp"

namespace hinf {

ClosedLoop closed_loop(const PlantModel& plant, const Vertex& v,
                       std::size_t vertex_index, const Matrix& K) {
  if (K.rows() != plant.m() || K.cols() != plant.n()) {
    throw InvalidInput(fmt::format("gain is {}x{}, expected {}x{}", K.rows(),
                                   K.cols(), plant.m(), plant.n()));
  }
  if (v.A.rows() != plant.n() || v.A.cols() != plant.n() ||
      v.B2.rows() != plant.n() || v.B2.cols() != plant.m()) {
    throw InvalidInput("vertex dimensions do not match the plant");
  }
  ClosedLoop cl;
  cl.Ac = v.A - v.B2 * K;
  cl.Cc = plant.C() - plant.D() * K;
  cl.B1 = plant.B1();
  cl.vertex = vertex_index;
  return cl;
}

double stability_margin(const ClosedLoop& cl) {
  double margin = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : eig_general(cl.Ac)) {
    margin = std::max(margin, lambda.real());
  }
  return margin;
}

namespace {

// NaN when jωI − Ac is numerically singular.
double sigma_or_nan(const ClosedLoop& cl, double omega) {
  const Index n = cl.Ac.rows();
  ComplexMatrix m = -cl.Ac.cast<std::complex<double>>();
  m.diagonal().array() += std::complex<double>(0.0, omega);
  const Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (!(lu.rcond() > 1e-14) || n == 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const ComplexMatrix h =
      cl.Cc.cast<std::complex<double>>() *
      lu.solve(cl.B1.cast<std::complex<double>>());
  return max_singular_value(h);
}

}  // namespace

double sigma_max_at(const ClosedLoop& cl, double omega) {
  const double s = sigma_or_nan(cl, omega);
  if (std::isnan(s)) {
    throw SingularSystem(fmt::format("jwI - Ac is singular at w = {}", omega));
  }
  return s;
}

SweepResult hinf_sweep(const ClosedLoop& cl, double fmin, double fmax,
                       std::size_t npts) {
  if (!(fmin > 0.0) || !(fmax > fmin) || !std::isfinite(fmax)) {
    throw InvalidInput(fmt::format(
        "frequency range must satisfy 0 < fmin < fmax, got [{}, {}]", fmin,
        fmax));
  }
  if (npts < 2) throw InvalidInput("npts must be at least 2");

  SweepResult out;
  if (stability_margin(cl) >= 0.0) {
    out.warnings.push_back(fmt::format(
        "vertex {}: closed loop is not asymptotically stable; the sweep peak "
        "is not the H-infinity norm",
        cl.vertex));
  }

  const double lo = std::log10(fmin);
  const double hi = std::log10(fmax);
  const double step = (hi - lo) / static_cast<double>(npts - 1);
  std::vector<double> log_grid;
  out.frequencies.reserve(npts);
  out.sigma_max.reserve(npts);
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < npts; ++k) {
    const double lw = (k + 1 == npts) ? hi : lo + step * static_cast<double>(k);
    const double w = std::pow(10.0, lw);
    const double s = sigma_or_nan(cl, w);
    if (std::isnan(s)) {
      ++skipped;
      continue;
    }
    log_grid.push_back(lw);
    out.frequencies.push_back(w);
    out.sigma_max.push_back(s);
  }
  if (skipped > 0) {
    out.warnings.push_back(fmt::format(
        "vertex {}: skipped {} frequencies where jwI - Ac is singular",
        cl.vertex, skipped));
  }
  if (out.sigma_max.empty()) {
    throw SingularSystem("no frequency in the sweep range could be evaluated");
  }

  const auto it = std::max_element(out.sigma_max.begin(), out.sigma_max.end());
  const auto kmax = static_cast<std::size_t>(it - out.sigma_max.begin());
  out.peak = *it;
  out.peak_frequency = out.frequencies[kmax];

  // Golden-section search for the maximum on log ω in the bracket around the
  // grid maximizer.
  double a = log_grid[kmax > 0 ? kmax - 1 : 0];
  double b = log_grid[std::min(kmax + 1, log_grid.size() - 1)];
  auto f = [&](double lw) {
    const double s = sigma_or_nan(cl, std::pow(10.0, lw));
    return std::isnan(s) ? -1.0 : s;
  };
  const double inv_phi = 1.0 / 1.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 80 && (b - a) > 1e-12; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double lw_best = fc > fd ? c : d;
  const double f_best = std::max(fc, fd);
  if (f_best > out.peak) {
    out.peak = f_best;
    out.peak_frequency = std::pow(10.0, lw_best);
  }
  return out;
}

bool FeasibilityReport::all_pass() const {
  if (!mu_positive) return false;
  return std::all_of(vertices.begin(), vertices.end(),
                     [](const VertexFeasibility& v) { return v.pass; });
}

double FeasibilityReport::worst_max_eig() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) worst = std::max(worst, v.max_eig_theta);
  return worst;
}

FeasibilityReport check_feasibility(const ExtendedMatrices& e,
                                    const SymMatrix& w, double mu, double tol,
                                    bool parallel) {
  FeasibilityReport rep;
  rep.tol = tol;
  rep.mu_positive = mu > 0.0;
  rep.min_eig_w = min_eig(w);
  rep.vertices.resize(e.num_vertices());
  detail::for_each_index(e.num_vertices(), parallel, [&](std::size_t i) {
    const SymMatrix theta = eval_theta1(e, i, w, mu);
    VertexFeasibility& v = rep.vertices[i];
    v.vertex = i;
    v.max_eig_theta = max_eig(theta);
    v.relative_violation = v.max_eig_theta / (1.0 + theta.norm());
    v.pass = v.max_eig_theta <= tol;
  });
  return rep;
}

std::vector<Trajectory> impulse_response(const ClosedLoop& cl, double horizon,
                                         double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput(fmt::format("dt must be positive, got {}", dt));
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidInput(fmt::format("horizon must be positive, got {}", horizon));
  }
  const Matrix& a = cl.Ac;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(cl.B1.cols()));
  for (Index j = 0; j < cl.B1.cols(); ++j) {
    Trajectory tr;
    tr.channel = static_cast<std::size_t>(j);
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    Vector x = cl.B1.col(j);
    double t = 0.0;
    tr.times.push_back(t);
    tr.states.push_back(x);
    for (std::size_t k = 1; k <= steps; ++k) {
      const double t_next =
          (k == steps) ? horizon : static_cast<double>(k) * dt;
      const double h = t_next - t;
      const Vector k1 = a * x;
      const Vector k2 = a * (x + 0.5 * h * k1);
      const Vector k3 = a * (x + 0.5 * h * k2);
      const Vector k4 = a * (x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = t_next;
      tr.times.push_back(t);
      tr.states.push_back(x);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace hinf
