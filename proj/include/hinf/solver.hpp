// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hinf/kernels.hpp"
#include "hinf/problem.hpp"

namespace hinf {

/// (1+√5)/2, the exclusive upper bound on the dual step length τ.
inline constexpr double kGoldenRatio = 1.6180339887498949;

struct SolverConfig {
  double sigma = 1.0;          // augmented-Lagrangian penalty σ > 0
  double tau = 1.618;          // dual step length, τ ∈ (0, (1+√5)/2)
  double eps = 1e-4;           // stop when err < eps
  std::size_t max_iters = 100000;
  bool parallel_projections = true;

  /// Throws InvalidInput when a field is out of range.
  void validate() const;
};

/**
 * An element of 𝒳 = 𝕊ᵖ × (𝕊ʳ)ᴺ × ℝ: the consensus vector Y and the
 * multiplier vector Z share this block layout.
 */
struct ConsensusVector {
  SymMatrix y0;                // p×p block paired with W
  std::vector<SymMatrix> yi;   // N blocks r×r paired with 𝒢ᵢ(W, μ)
  double last = 0.0;           // scalar paired with μ

  static ConsensusVector zero(const SchurData& s);

  double squared_norm() const;
  double norm() const;
  /// True when the block shapes match `s`.
  bool matches(const SchurData& s) const;
};

/// ℋ(W, μ) = (W, 𝒢₁(W, μ), …, 𝒢_N(W, μ), μ).
ConsensusVector apply_h(const SchurData& s, const SymMatrix& w, double mu,
                        bool parallel = false);

/// Per-iteration record. `gap` is the relative duality gap
/// |μ − Σᵢ⟨Zᵢ, H₀⟩| / (1 + |μ| + |Σᵢ⟨Zᵢ, H₀⟩|).
struct IterationRecord {
  std::size_t k = 0;
  double err_w = 0.0;
  double err_mu = 0.0;
  double err_y = 0.0;
  double err_eq = 0.0;
  double err = 0.0;
  double mu = 0.0;
  double gap = 0.0;
};

struct Residuals {
  double err_w = 0.0;
  double err_mu = 0.0;
  double err_y = 0.0;
  double err_eq = 0.0;
  double err = 0.0;
};

struct StartPoint {
  SymMatrix w;
  double mu = 0.0;
  ConsensusVector y;
  ConsensusVector z;
};

struct SolverState {
  SymMatrix w;
  double mu = 0.0;
  ConsensusVector y;
  ConsensusVector z;
  std::size_t k = 0;
  std::vector<IterationRecord> history;
};

enum class SolveStatus { converged, max_iters, numerical_failure };

const char* to_string(SolveStatus s);

struct Solution {
  SymMatrix w_star;
  double mu_star = 0.0;
  std::optional<Matrix> k_star;
  std::optional<double> gamma_star;
  SolveStatus status = SolveStatus::max_iters;
  std::size_t iters = 0;
  std::vector<IterationRecord> history;
  std::string message;
};

/// Called after every completed iteration with the updated state.
using IterationObserver = std::function<void(const SolverState&)>;

/// Zero state, or the supplied start point after a shape check.
SolverState init(const SchurData& s, const SolverConfig& c,
                 const std::optional<StartPoint>& start = std::nullopt);

/**
 * Step 2: cone projections of every Y block at (Wᵏ, μᵏ; Zᵏ).
 *
 *   Y_{N+1} = Π_{ℝ₊}(μ − Z_{N+1}/σ)
 *   Yᵢ      = Π_{𝕊ʳ₊}(𝒢ᵢ(W, μ) − Zᵢ/σ)
 *   Y₀      = Π_{𝕊ᵖ₊}(W − Z₀/σ)
 *
 * The blocks are independent; the parallel variant spreads the N vertex
 * projections over OpenMP threads and produces bitwise the same result as
 * the serial reference.
 */
ConsensusVector update_y(const SolverState& st, const SchurData& s,
                         const SolverConfig& c);
ConsensusVector update_y_serial(const SolverState& st, const SchurData& s,
                                double sigma);
ConsensusVector update_y_parallel(const SolverState& st, const SchurData& s,
                                  double sigma);

/// Backward-sweep μ̄: closed-form minimizer of 𝓛_σ over μ at
/// (Y^{k+1}, Wᵏ; Zᵏ). `st.y` must already hold Y^{k+1}.
double backward_mu(const SolverState& st, const SchurData& s,
                   const SolverConfig& c);

/// Minimizer of 𝓛_σ over W at (Y^{k+1}, μ̄; Zᵏ), from the factorized
/// Kronecker system: vec(W) = −M⁻¹ vec(T₀).
SymMatrix update_w(const SolverState& st, const SchurData& s,
                   const SolverConfig& c, double mu_bar);

/// Forward-sweep μ: the backward formula evaluated at W^{k+1}.
double forward_mu(const SolverState& st, const SchurData& s,
                  const SolverConfig& c, const SymMatrix& w_new);

/// Z^{k+1} = Zᵏ + τσ(Y^{k+1} − ℋ(W^{k+1}, μ^{k+1})); `st` holds the new
/// primal blocks and the old multipliers.
ConsensusVector update_z(const SolverState& st, const SchurData& s,
                         const SolverConfig& c);

/// Relative KKT residuals and their maximum.
Residuals residuals(const SolverState& st, const SchurData& s,
                    bool parallel = false);

double duality_gap(const SolverState& st, const SchurData& s);

/// Runs the symmetric Gauss-Seidel ADMM loop until err < eps or max_iters.
Solution solve(const SchurData& s, const SolverConfig& c,
               const std::optional<StartPoint>& start = std::nullopt,
               const IterationObserver& observer = {});

/// K = W₂ᵀW₁⁻¹. Throws ExtractionError when W₁ is singular or its
/// condition number reaches 1e12.
Matrix extract_gain(const SymMatrix& w, Index n, Index m);

}  // namespace hinf
