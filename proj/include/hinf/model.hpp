// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "hinf/kernels.hpp"

namespace hinf {

/**
 * Continuous-time plant
 *
 *   ẋ = A x + B₂ u + B₁ w,   z = C x + D u,   u = −K x
 *
 * with n states, m inputs, l disturbances and q outputs. Construction only
 * checks dimensions and finiteness; the modelling assumptions are checked
 * by validate_plant().
 */
class PlantModel {
 public:
  PlantModel(Matrix a, Matrix b1, Matrix b2, Matrix c, Matrix d);

  const Matrix& A() const { return a_; }
  const Matrix& B1() const { return b1_; }
  const Matrix& B2() const { return b2_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }

  Index n() const { return a_.rows(); }
  Index m() const { return b2_.cols(); }
  Index l() const { return b1_.cols(); }
  Index q() const { return c_.rows(); }

 private:
  Matrix a_, b1_, b2_, c_, d_;
};

/// Entrywise relative bounds: entry (i,j) ranges over
/// nominal ± fraction(i,j)·|nominal|.
struct RelativeBounds {
  Matrix delta_a;   // n×n, nonnegative
  Matrix delta_b2;  // n×m, nonnegative
};

/// One extreme system of the uncertainty polytope.
struct Vertex {
  Matrix A;
  Matrix B2;
};

/// Either a bound box or an explicit vertex list.
using UncertaintySpec = std::variant<RelativeBounds, std::vector<Vertex>>;

inline constexpr std::size_t kDefaultVertexCap = 4096;

struct VertexSet {
  std::vector<Vertex> vertices;
  std::size_t size() const { return vertices.size(); }
};

struct ValidationReport {
  std::vector<std::string> warnings;
};

/// Hard checks CᵀD = 0 (abs. 1e-9) and λ_min(DᵀD) ≥ 1e-9, throwing
/// AssumptionViolation. PBH rank tests for stabilizability of [A, B₂] and
/// observability of [A, C] only produce warnings.
ValidationReport validate_plant(const PlantModel& p);

/// Zero bounds of the right shape for `p`.
RelativeBounds no_uncertainty(const PlantModel& p);

/**
 * Expands the uncertainty description into its vertex list.
 *
 * For a bound box the uncertain entries are those with a positive fraction
 * and a nonzero nominal value, ordered row-major through A and then B₂.
 * Bit j of the vertex index picks the lower (0) or upper (1) bound of the
 * j-th uncertain entry, so vertex 0 has every entry at its lower bound.
 * Explicit vertex lists are checked and passed through.
 */
VertexSet enumerate_vertices(const PlantModel& p, const UncertaintySpec& u,
                             std::size_t cap = kDefaultVertexCap);

/// Number of uncertain entries a bound box declares for `p`.
std::size_t count_uncertain_entries(const PlantModel& p, const RelativeBounds& b);

}  // namespace hinf
