// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace hinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/**
 * A real symmetric matrix.
 *
 * Every constructor symmetrizes its argument, S ← (S + Sᵀ)/2, so the stored
 * entries are exactly symmetric. Arithmetic helpers re-symmetrize their
 * results.
 */
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Symmetrizes `m`. Throws InvalidInput when `m` is not square.
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Index dim);
  static SymMatrix identity(Index dim);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }

  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix operator-() const;
  SymMatrix operator*(double s) const;

 private:
  Matrix m_;
};

inline SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

/// Frobenius inner product ⟨A, B⟩ = Tr(AᵀB).
inline double inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}
inline double inner(const SymMatrix& a, const SymMatrix& b) {
  return inner(a.matrix(), b.matrix());
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// λ₁ ≥ … ≥ λₙ; column i of `eigenvectors` pairs with `eigenvalues(i)`.
struct EigDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;
};

EigDecomp sym_eig(const SymMatrix& s);

/// Smallest and largest eigenvalues of a symmetric matrix.
double min_eig(const SymMatrix& s);
double max_eig(const SymMatrix& s);

/// Frobenius-nearest positive semi-definite matrix: Σ max(λᵢ, 0) vᵢvᵢᵀ.
/// Eigenvalues are clipped at exactly zero.
SymMatrix project_psd(const SymMatrix& s);

inline double project_nonneg(double x) { return x > 0.0 ? x : 0.0; }

/// Symmetric PSD square root. Eigenvalues in [-1e-6, 0) are treated as
/// zero; anything more negative throws NotPsd.
SymMatrix sym_sqrt(const SymMatrix& s);

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major stacking.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Reusable Cholesky factorization of a symmetric positive definite matrix.
class SpdSolver {
 public:
  SpdSolver() = default;
  /// Throws SingularSystem on a non-positive pivot.
  explicit SpdSolver(const SymMatrix& m);

  Vector solve(const Vector& b) const;
  Index dim() const { return dim_; }

 private:
  Eigen::LLT<Matrix> llt_;
  Index dim_ = 0;
};

Vector solve_spd(const SymMatrix& m, const Vector& b);

/// All n eigenvalues of a real square matrix (unsorted).
std::vector<std::complex<double>> eig_general(const Matrix& a);

/// Largest singular value, √λ_max(MᴴM).
double max_singular_value(const ComplexMatrix& m);

/// Throws InvalidInput when any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

}  // namespace hinf
