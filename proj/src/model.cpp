// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "hinf/errors.hpp"

namespace hinf {

namespace {

void require_shape(const Matrix& m, Index rows, Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidInput(fmt::format("{} is {}x{}, expected {}x{}", name,
                                   m.rows(), m.cols(), rows, cols));
  }
}

// Numerical rank; singular values below 1e-9·max(1, σ₁) count as zero.
Index numerical_rank(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double tol = 1e-9 * std::max(1.0, s(0));
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++rank;
  }
  return rank;
}

}  // namespace

PlantModel::PlantModel(Matrix a, Matrix b1, Matrix b2, Matrix c, Matrix d)
    : a_(std::move(a)),
      b1_(std::move(b1)),
      b2_(std::move(b2)),
      c_(std::move(c)),
      d_(std::move(d)) {
  const Index n = a_.rows();
  if (n == 0) throw InvalidInput("A must have at least one row");
  require_shape(a_, n, n, "A");
  if (b1_.rows() != n || b1_.cols() == 0) {
    throw InvalidInput(fmt::format("B1 is {}x{}, expected {}xl with l>0",
                                   b1_.rows(), b1_.cols(), n));
  }
  if (b2_.rows() != n || b2_.cols() == 0) {
    throw InvalidInput(fmt::format("B2 is {}x{}, expected {}xm with m>0",
                                   b2_.rows(), b2_.cols(), n));
  }
  if (c_.cols() != n || c_.rows() == 0) {
    throw InvalidInput(fmt::format("C is {}x{}, expected qx{} with q>0",
                                   c_.rows(), c_.cols(), n));
  }
  require_shape(d_, c_.rows(), b2_.cols(), "D");
  require_finite(a_, "A");
  require_finite(b1_, "B1");
  require_finite(b2_, "B2");
  require_finite(c_, "C");
  require_finite(d_, "D");
}

ValidationReport validate_plant(const PlantModel& p) {
  const Matrix ctd = p.C().transpose() * p.D();
  if (ctd.cwiseAbs().maxCoeff() > 1e-9) {
    throw AssumptionViolation(fmt::format(
        "CᵀD = 0 violated (max |entry| = {:.3e})", ctd.cwiseAbs().maxCoeff()));
  }
  const double dtd_min = min_eig(SymMatrix(p.D().transpose() * p.D()));
  if (dtd_min < 1e-9) {
    throw AssumptionViolation(fmt::format(
        "DᵀD not positive definite (min eigenvalue = {:.3e})", dtd_min));
  }

  ValidationReport report;
  const Index n = p.n();
  const auto modes = eig_general(p.A());
  for (const auto& lambda : modes) {
    ComplexMatrix ctrb(n, n + p.m());
    ctrb.leftCols(n) = lambda * ComplexMatrix::Identity(n, n) - p.A().cast<std::complex<double>>();
    ctrb.rightCols(p.m()) = p.B2().cast<std::complex<double>>();
    if (lambda.real() >= 0.0 && numerical_rank(ctrb) < n) {
      report.warnings.push_back(fmt::format(
          "[A, B2] may not be stabilizable: mode {:.6g}{:+.6g}i fails the PBH "
          "rank test",
          lambda.real(), lambda.imag()));
    }
    ComplexMatrix obsv(n + p.q(), n);
    obsv.topRows(n) = lambda * ComplexMatrix::Identity(n, n) - p.A().cast<std::complex<double>>();
    obsv.bottomRows(p.q()) = p.C().cast<std::complex<double>>();
    if (numerical_rank(obsv) < n) {
      report.warnings.push_back(fmt::format(
          "[A, C] may not be observable: mode {:.6g}{:+.6g}i fails the PBH "
          "rank test",
          lambda.real(), lambda.imag()));
    }
  }
  return report;
}

RelativeBounds no_uncertainty(const PlantModel& p) {
  return {Matrix::Zero(p.n(), p.n()), Matrix::Zero(p.n(), p.m())};
}

namespace {

struct UncertainEntry {
  bool in_a;
  Index row;
  Index col;
  double lower;
  double upper;
};

std::vector<UncertainEntry> uncertain_entries(const PlantModel& p,
                                              const RelativeBounds& b) {
  require_shape(b.delta_a, p.n(), p.n(), "relative bounds on A");
  require_shape(b.delta_b2, p.n(), p.m(), "relative bounds on B2");
  std::vector<UncertainEntry> out;
  auto scan = [&](const Matrix& nominal, const Matrix& frac, bool in_a) {
    for (Index i = 0; i < nominal.rows(); ++i) {
      for (Index j = 0; j < nominal.cols(); ++j) {
        const double f = frac(i, j);
        if (!std::isfinite(f) || f < 0.0) {
          throw InvalidInput(fmt::format(
              "relative bound ({}, {}) on {} must be a nonnegative number", i,
              j, in_a ? "A" : "B2"));
        }
        const double v = nominal(i, j);
        if (f == 0.0 || v == 0.0) continue;
        const double a = v * (1.0 - f);
        const double b = v * (1.0 + f);
        out.push_back({in_a, i, j, std::min(a, b), std::max(a, b)});
      }
    }
  };
  scan(p.A(), b.delta_a, true);
  scan(p.B2(), b.delta_b2, false);
  return out;
}

}  // namespace

std::size_t count_uncertain_entries(const PlantModel& p,
                                    const RelativeBounds& b) {
  return uncertain_entries(p, b).size();
}

VertexSet enumerate_vertices(const PlantModel& p, const UncertaintySpec& u,
                             std::size_t cap) {
  VertexSet out;
  if (const auto* list = std::get_if<std::vector<Vertex>>(&u)) {
    if (list->empty()) throw InvalidInput("vertex list is empty");
    if (list->size() > cap) {
      throw CapacityError(fmt::format(
          "{} vertices supplied, vertex cap is {}", list->size(), cap));
    }
    for (std::size_t i = 0; i < list->size(); ++i) {
      const Vertex& v = (*list)[i];
      require_shape(v.A, p.n(), p.n(), "vertex A");
      require_shape(v.B2, p.n(), p.m(), "vertex B2");
      require_finite(v.A, "vertex A");
      require_finite(v.B2, "vertex B2");
    }
    out.vertices = *list;
    return out;
  }

  const auto entries = uncertain_entries(p, std::get<RelativeBounds>(u));
  const std::size_t count = entries.size();
  if (count >= 63 || (std::size_t{1} << count) > cap) {
    throw CapacityError(fmt::format(
        "{} uncertain entries need 2^{} vertices, vertex cap is {}", count,
        count, cap));
  }
  const std::size_t total = std::size_t{1} << count;
  out.vertices.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vertex v{p.A(), p.B2()};
    for (std::size_t j = 0; j < count; ++j) {
      const auto& e = entries[j];
      const double value = ((idx >> j) & 1u) ? e.upper : e.lower;
      (e.in_a ? v.A : v.B2)(e.row, e.col) = value;
    }
    out.vertices.push_back(std::move(v));
  }
  return out;
}

}  // namespace hinf
