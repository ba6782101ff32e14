// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/kernels.hpp"

#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hinf/errors.hpp"

namespace hinf {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidInput("SymMatrix: matrix is " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()) + ", not square");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::identity(Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim));
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  return SymMatrix(m_ + other.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  return SymMatrix(m_ - other.m_);
}

SymMatrix SymMatrix::operator-() const { return SymMatrix(-m_); }

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(s * m_); }

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> decompose(const SymMatrix& s,
                                                bool vectors) {
  require_finite(s.matrix(), "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      s.matrix(), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("sym_eig: eigen-decomposition did not converge");
  }
  return es;
}

}  // namespace

EigDecomp sym_eig(const SymMatrix& s) {
  auto es = decompose(s, true);
  // Eigen returns ascending order.
  EigDecomp out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  return out;
}

double min_eig(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  return decompose(s, false).eigenvalues()(0);
}

double max_eig(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  return decompose(s, false).eigenvalues()(s.dim() - 1);
}

SymMatrix project_psd(const SymMatrix& s) {
  if (s.dim() == 0) return s;
  auto es = decompose(s, true);
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  const Matrix& v = es.eigenvectors();
  return SymMatrix(v * clipped.asDiagonal() * v.transpose());
}

SymMatrix sym_sqrt(const SymMatrix& s) {
  if (s.dim() == 0) return s;
  auto es = decompose(s, true);
  const Vector& lambda = es.eigenvalues();
  if (lambda(0) < -1e-6) {
    throw NotPsd("sym_sqrt: eigenvalue " + std::to_string(lambda(0)) +
                 " is below -1e-6");
  }
  const Vector root = lambda.cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = es.eigenvectors();
  return SymMatrix(v * root.asDiagonal() * v.transpose());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& m) {
  // Eigen's default storage is column-major, which is exactly vec(·).
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw InvalidInput("unvec: vector of length " + std::to_string(v.size()) +
                       " cannot be reshaped to " + std::to_string(rows) + "x" +
                       std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

SpdSolver::SpdSolver(const SymMatrix& m) : dim_(m.dim()) {
  require_finite(m.matrix(), "solve_spd");
  llt_.compute(m.matrix());
  if (llt_.info() != Eigen::Success) {
    throw SingularSystem("solve_spd: matrix is not positive definite");
  }
}

Vector SpdSolver::solve(const Vector& b) const {
  if (b.size() != dim_) {
    throw InvalidInput("solve_spd: right-hand side has length " +
                       std::to_string(b.size()) + ", expected " +
                       std::to_string(dim_));
  }
  return llt_.solve(b);
}

Vector solve_spd(const SymMatrix& m, const Vector& b) {
  return SpdSolver(m).solve(b);
}

std::vector<std::complex<double>> eig_general(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidInput("eig_general: matrix is not square");
  }
  require_finite(a, "eig_general");
  if (a.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("eig_general: QR iteration did not converge");
  }
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double max_singular_value(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) {
    throw InvalidInput("max_singular_value: non-finite entry");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace hinf
