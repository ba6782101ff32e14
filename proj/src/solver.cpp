// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/solver.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "hinf/errors.hpp"
#include "parallel.hpp"

namespace hinf {

void SolverConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidInput(fmt::format("sigma must be positive, got {}", sigma));
  }
  if (!(tau > 0.0 && tau < kGoldenRatio)) {
    throw InvalidInput(
        fmt::format("tau must lie in (0, (1+sqrt(5))/2), got {}", tau));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidInput(fmt::format("eps must be positive, got {}", eps));
  }
  if (max_iters == 0) throw InvalidInput("max_iters must be positive");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters:
      return "max-iters";
    case SolveStatus::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

ConsensusVector ConsensusVector::zero(const SchurData& s) {
  ConsensusVector v;
  v.y0 = SymMatrix::zero(s.p);
  v.yi.assign(s.num_vertices(), SymMatrix::zero(s.r));
  v.last = 0.0;
  return v;
}

double ConsensusVector::squared_norm() const {
  double acc = y0.matrix().squaredNorm();
  for (const auto& b : yi) acc += b.matrix().squaredNorm();
  return acc + last * last;
}

double ConsensusVector::norm() const { return std::sqrt(squared_norm()); }

bool ConsensusVector::matches(const SchurData& s) const {
  if (y0.dim() != s.p || yi.size() != s.num_vertices()) return false;
  for (const auto& b : yi) {
    if (b.dim() != s.r) return false;
  }
  return true;
}

namespace {

// Reductions run in index order so serial and parallel paths agree bitwise.
double sum_in_order(const std::vector<double>& terms) {
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

Matrix sum_in_order(const std::vector<Matrix>& terms, Index rows, Index cols) {
  Matrix acc = Matrix::Zero(rows, cols);
  for (const auto& t : terms) acc += t;
  return acc;
}

// Closed-form stationary point of 𝓛_σ in μ for a fixed W.
double mu_closed_form(const SolverState& st, const SchurData& s, double sigma,
                      const SymMatrix& w, bool parallel) {
  const std::size_t n_vert = s.num_vertices();
  std::vector<double> terms(n_vert);
  detail::for_each_index(n_vert, parallel, [&](std::size_t i) {
    const Matrix t = s.H1[i] * w.matrix() * s.H2;
    // ⟨t + tᵀ, H₃⟩ = 2⟨t, H₃⟩ since H₃ is symmetric.
    terms[i] = 2.0 * inner(t, s.H3.matrix()) -
               inner(st.y.yi[i].matrix(), s.H3.matrix()) -
               inner(st.z.yi[i].matrix(), s.H3.matrix()) / sigma;
  });
  const double n = static_cast<double>(n_vert);
  const double numer = 1.0 - sigma * sum_in_order(terms) + sigma * st.y.last +
                       st.z.last - sigma * n * s.h0_dot_h3;
  return numer / (sigma * (n * s.tr_h3_sq + 1.0));
}

}  // namespace

ConsensusVector apply_h(const SchurData& s, const SymMatrix& w, double mu,
                        bool parallel) {
  ConsensusVector h;
  h.y0 = w;
  h.yi.resize(s.num_vertices());
  detail::for_each_index(s.num_vertices(), parallel, [&](std::size_t i) {
    h.yi[i] = eval_g(s, i, w, mu);
  });
  h.last = mu;
  return h;
}

SolverState init(const SchurData& s, const SolverConfig& c,
                 const std::optional<StartPoint>& start) {
  c.validate();
  SolverState st;
  if (!start) {
    st.w = SymMatrix::zero(s.p);
    st.mu = 0.0;
    st.y = ConsensusVector::zero(s);
    st.z = ConsensusVector::zero(s);
    return st;
  }
  if (start->w.dim() != s.p || !start->y.matches(s) || !start->z.matches(s)) {
    throw InvalidInput("start point does not match the problem dimensions");
  }
  if (!std::isfinite(start->mu)) throw InvalidInput("start mu is not finite");
  st.w = start->w;
  st.mu = start->mu;
  st.y = start->y;
  st.z = start->z;
  return st;
}

namespace {

ConsensusVector update_y_impl(const SolverState& st, const SchurData& s,
                              double sigma, bool parallel) {
  ConsensusVector y;
  y.last = project_nonneg(st.mu - st.z.last / sigma);
  y.yi.resize(s.num_vertices());
  detail::for_each_index(s.num_vertices(), parallel, [&](std::size_t i) {
    const SymMatrix g = eval_g(s, i, st.w, st.mu);
    y.yi[i] = project_psd(SymMatrix(g.matrix() - st.z.yi[i].matrix() / sigma));
  });
  y.y0 = project_psd(SymMatrix(st.w.matrix() - st.z.y0.matrix() / sigma));
  return y;
}

}  // namespace

ConsensusVector update_y_serial(const SolverState& st, const SchurData& s,
                                double sigma) {
  return update_y_impl(st, s, sigma, false);
}

ConsensusVector update_y_parallel(const SolverState& st, const SchurData& s,
                                  double sigma) {
  return update_y_impl(st, s, sigma, true);
}

ConsensusVector update_y(const SolverState& st, const SchurData& s,
                         const SolverConfig& c) {
  return c.parallel_projections ? update_y_parallel(st, s, c.sigma)
                                : update_y_serial(st, s, c.sigma);
}

double backward_mu(const SolverState& st, const SchurData& s,
                   const SolverConfig& c) {
  return mu_closed_form(st, s, c.sigma, st.w, c.parallel_projections);
}

double forward_mu(const SolverState& st, const SchurData& s,
                  const SolverConfig& c, const SymMatrix& w_new) {
  return mu_closed_form(st, s, c.sigma, w_new, c.parallel_projections);
}

SymMatrix update_w(const SolverState& st, const SchurData& s,
                   const SolverConfig& c, double mu_bar) {
  const double sigma = c.sigma;
  const Index p = s.p;
  std::vector<Matrix> terms(s.num_vertices());
  const Matrix base = mu_bar * s.H3.matrix() + s.H0.matrix();
  detail::for_each_index(
      s.num_vertices(), c.parallel_projections, [&](std::size_t i) {
        const Matrix m =
            base - st.y.yi[i].matrix() - st.z.yi[i].matrix() / sigma;
        const Matrix t = s.H1[i].transpose() * m * s.H2.transpose();
        // H₂MHᵢ₁ = (Hᵢ₁ᵀMH₂ᵀ)ᵀ for symmetric M.
        terms[i] = t + t.transpose();
      });
  const Matrix t0 = -st.y.y0.matrix() - st.z.y0.matrix() / sigma +
                    sum_in_order(terms, p, p);
  const Vector w_vec = -s.wsolve.solve(vec(t0));
  return SymMatrix(unvec(w_vec, p, p));
}

ConsensusVector update_z(const SolverState& st, const SchurData& s,
                         const SolverConfig& c) {
  const double step = c.tau * c.sigma;
  ConsensusVector z;
  z.y0 = SymMatrix(st.z.y0.matrix() +
                   step * (st.y.y0.matrix() - st.w.matrix()));
  z.yi.resize(s.num_vertices());
  detail::for_each_index(
      s.num_vertices(), c.parallel_projections, [&](std::size_t i) {
        const SymMatrix g = eval_g(s, i, st.w, st.mu);
        z.yi[i] = SymMatrix(st.z.yi[i].matrix() +
                            step * (st.y.yi[i].matrix() - g.matrix()));
      });
  z.last = st.z.last + step * (st.y.last - st.mu);
  return z;
}

Residuals residuals(const SolverState& st, const SchurData& s, bool parallel) {
  const std::size_t n_vert = s.num_vertices();
  const Index p = s.p;

  // Per-vertex contributions, reduced in index order afterwards.
  std::vector<Matrix> adj(n_vert);
  std::vector<double> adj_norm(n_vert);
  std::vector<double> z_h3(n_vert);
  std::vector<double> proj_gap_sq(n_vert);
  std::vector<double> eq_sq(n_vert);
  std::vector<double> h_sq(n_vert);
  detail::for_each_index(n_vert, parallel, [&](std::size_t i) {
    const Matrix& zi = st.z.yi[i].matrix();
    const Matrix t = s.H1[i].transpose() * zi * s.H2.transpose();
    adj[i] = t + t.transpose();
    adj_norm[i] = adj[i].norm();
    z_h3[i] = inner(zi, s.H3.matrix());
    const SymMatrix proj =
        project_psd(SymMatrix(st.y.yi[i].matrix() - zi));
    proj_gap_sq[i] = (st.y.yi[i].matrix() - proj.matrix()).squaredNorm();
    const SymMatrix g = eval_g(s, i, st.w, st.mu);
    eq_sq[i] = (st.y.yi[i].matrix() - g.matrix()).squaredNorm();
    h_sq[i] = g.matrix().squaredNorm();
  });

  Residuals r;
  {
    const Matrix num = st.z.y0.matrix() + sum_in_order(adj, p, p);
    const double den = 1.0 + st.z.y0.norm() + sum_in_order(adj_norm);
    r.err_w = num.norm() / den;
  }
  r.err_mu = std::abs(1.0 + st.z.last + sum_in_order(z_h3)) / 2.0;
  {
    const SymMatrix proj0 = project_psd(st.y.y0 - st.z.y0);
    const double last_proj = project_nonneg(st.y.last - st.z.last);
    const double gap_sq =
        (st.y.y0.matrix() - proj0.matrix()).squaredNorm() +
        sum_in_order(proj_gap_sq) +
        (st.y.last - last_proj) * (st.y.last - last_proj);
    r.err_y = std::sqrt(gap_sq) / (1.0 + st.y.norm() + st.z.norm());
  }
  {
    const double eq0 = (st.y.y0.matrix() - st.w.matrix()).squaredNorm();
    const double eq_last = (st.y.last - st.mu) * (st.y.last - st.mu);
    const double eq = std::sqrt(eq0 + sum_in_order(eq_sq) + eq_last);
    const double h_norm = std::sqrt(st.w.matrix().squaredNorm() +
                                    sum_in_order(h_sq) + st.mu * st.mu);
    r.err_eq = eq / (1.0 + st.y.norm() + h_norm);
  }
  r.err = std::max({r.err_w, r.err_mu, r.err_y, r.err_eq});
  return r;
}

double duality_gap(const SolverState& st, const SchurData& s) {
  double dual = 0.0;
  for (const auto& zi : st.z.yi) dual += inner(zi, s.H0);
  return std::abs(st.mu - dual) / (1.0 + std::abs(st.mu) + std::abs(dual));
}

Matrix extract_gain(const SymMatrix& w, Index n, Index m) {
  if (n <= 0 || m <= 0 || w.dim() != n + m) {
    throw InvalidInput(fmt::format(
        "extract_gain: W is {0}x{0}, expected {1}x{1}", w.dim(), n + m));
  }
  const Matrix w1 = w.matrix().topLeftCorner(n, n);
  const Matrix w2 = w.matrix().topRightCorner(n, m);
  const Vector sv = Eigen::JacobiSVD<Matrix>(w1).singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || smax / smin >= 1e12) {
    throw ExtractionError(fmt::format(
        "W1 is singular or ill-conditioned (sigma_min={:.3e}, "
        "sigma_max={:.3e})",
        smin, smax));
  }
  // K = W₂ᵀW₁⁻¹ = (W₁⁻¹W₂)ᵀ because W₁ is symmetric.
  return w1.partialPivLu().solve(w2).transpose();
}

namespace {

IterationRecord make_record(const SolverState& st, const Residuals& r,
                            const SchurData& s) {
  return {st.k,     r.err_w, r.err_mu,         r.err_y,
          r.err_eq, r.err,   st.mu, duality_gap(st, s)};
}

void finish(Solution& sol, const SolverState& st, const SchurData& s) {
  sol.w_star = st.w;
  sol.mu_star = st.mu;
  sol.iters = st.k;
  if (sol.status == SolveStatus::numerical_failure) return;
  try {
    sol.k_star = extract_gain(st.w, s.n, s.m);
  } catch (const ExtractionError& e) {
    if (sol.status == SolveStatus::converged) {
      sol.status = SolveStatus::numerical_failure;
      sol.message = e.what();
    }
  }
  if (st.mu > 0.0) {
    sol.gamma_star = 1.0 / std::sqrt(st.mu);
  } else if (sol.status == SolveStatus::converged) {
    sol.status = SolveStatus::numerical_failure;
    sol.message = fmt::format("mu* = {:.6g} is not positive; gamma is undefined",
                              st.mu);
  }
}

}  // namespace

Solution solve(const SchurData& s, const SolverConfig& c,
               const std::optional<StartPoint>& start,
               const IterationObserver& observer) {
  SolverState st = init(s, c, start);
  Solution sol;
  st.history.push_back(
      make_record(st, residuals(st, s, c.parallel_projections), s));

  sol.status = SolveStatus::max_iters;
  try {
    for (std::size_t k = 1; k <= c.max_iters; ++k) {
      st.y = update_y(st, s, c);
      const double mu_bar = backward_mu(st, s, c);
      const SymMatrix w_new = update_w(st, s, c, mu_bar);
      const double mu_new = forward_mu(st, s, c, w_new);
      if (!w_new.matrix().allFinite() || !std::isfinite(mu_new)) {
        throw ConvergenceFailure(
            fmt::format("non-finite iterate at iteration {}", k));
      }
      st.w = w_new;
      st.mu = mu_new;
      st.z = update_z(st, s, c);
      st.k = k;

      const Residuals r = residuals(st, s, c.parallel_projections);
      st.history.push_back(make_record(st, r, s));
      if (observer) observer(st);
      if (r.err < c.eps) {
        sol.status = SolveStatus::converged;
        break;
      }
    }
  } catch (const Error& e) {
    sol.status = SolveStatus::numerical_failure;
    sol.message = e.what();
  }
  if (sol.status == SolveStatus::max_iters) {
    sol.message = fmt::format("err did not reach {:.3g} in {} iterations",
                              c.eps, c.max_iters);
  }
  finish(sol, st, s);
  sol.history = std::move(st.history);
  return sol;
}

}  // namespace hinf
