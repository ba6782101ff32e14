// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "hinf/kernels.hpp"
#include "hinf/model.hpp"

namespace hinf {

/**
 * Extended (p = n+m)-dimensional description of the plant family.
 *
 *   Fᵢ = [Aᵢ  −B₂ᵢ; 0  0],   G = [0; I_m],
 *   Q  = blkdiag(B₁B₁ᵀ, 0),  R = blkdiag(CᵀC, DᵀD),  V = [I_n 0].
 *
 * The per-vertex (Aᵢ, B₂ᵢ) and the plant-level products are kept alongside
 * so Θ₁ᵢ can be evaluated directly.
 */
struct ExtendedMatrices {
  Index n = 0;
  Index m = 0;
  Index p = 0;

  std::vector<Matrix> F;
  Matrix G;
  SymMatrix Q;
  SymMatrix R;
  SymMatrix Rhalf;
  Matrix V;

  std::vector<Vertex> vertices;
  SymMatrix B1B1t;
  SymMatrix CtC;
  SymMatrix DtD;

  std::size_t num_vertices() const { return F.size(); }
};

ExtendedMatrices build_extended(const PlantModel& plant, const VertexSet& v);

/**
 * Operator data of the Schur-complement form
 *
 *   𝒢ᵢ(W, μ) = Hᵢ₁ W H₂ + H₂ᵀ W Hᵢ₁ᵀ + μ H₃ + H₀   (r×r, r = m+2n)
 *
 * and the factorized p²×p² matrix of the W sub-problem
 *
 *   I + Σᵢ [(H₂H₂ᵀ)⊗(Hᵢ₁ᵀHᵢ₁) + (H₂Hᵢ₁)⊗(Hᵢ₁ᵀH₂ᵀ)
 *           + (Hᵢ₁ᵀH₂ᵀ)⊗(H₂Hᵢ₁) + (Hᵢ₁ᵀHᵢ₁)⊗(H₂H₂ᵀ)].
 */
struct SchurData {
  Index n = 0;
  Index m = 0;
  Index p = 0;
  Index r = 0;

  SymMatrix H0;
  Matrix H2;
  SymMatrix H3;
  std::vector<Matrix> H1;

  SymMatrix wsolve_matrix;
  SpdSolver wsolve;

  double tr_h3_sq = 0.0;   // Tr(H₃²)
  double h0_dot_h3 = 0.0;  // ⟨H₀, H₃⟩, zero by construction

  std::size_t num_vertices() const { return H1.size(); }
};

SchurData build_schur(const ExtendedMatrices& e);

/// Θ₁ᵢ(W, μ) = AᵢW₁ − B₂ᵢW₂ᵀ + W₁Aᵢᵀ − W₂B₂ᵢᵀ + W₁CᵀCW₁ + W₂DᵀDW₂ᵀ + μB₁B₁ᵀ.
SymMatrix eval_theta1(const ExtendedMatrices& e, std::size_t vertex,
                      const SymMatrix& w, double mu);

SymMatrix eval_g(const SchurData& s, std::size_t vertex, const SymMatrix& w,
                 double mu);

}  // namespace hinf
