// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/problem.hpp"

#include <fmt/format.h>

#include "hinf/errors.hpp"

namespace hinf {

ExtendedMatrices build_extended(const PlantModel& plant, const VertexSet& v) {
  if (v.size() == 0) throw InvalidInput("vertex set is empty");
  const Index n = plant.n();
  const Index m = plant.m();
  const Index p = n + m;

  ExtendedMatrices e;
  e.n = n;
  e.m = m;
  e.p = p;
  e.B1B1t = SymMatrix(plant.B1() * plant.B1().transpose());
  e.CtC = SymMatrix(plant.C().transpose() * plant.C());
  e.DtD = SymMatrix(plant.D().transpose() * plant.D());

  Matrix q = Matrix::Zero(p, p);
  q.topLeftCorner(n, n) = e.B1B1t.matrix();
  e.Q = SymMatrix(q);

  Matrix r = Matrix::Zero(p, p);
  r.topLeftCorner(n, n) = e.CtC.matrix();
  r.bottomRightCorner(m, m) = e.DtD.matrix();
  e.R = SymMatrix(r);
  e.Rhalf = sym_sqrt(e.R);

  e.G = Matrix::Zero(p, m);
  e.G.bottomRows(m).setIdentity();
  e.V = Matrix::Zero(n, p);
  e.V.leftCols(n).setIdentity();

  e.F.reserve(v.size());
  for (const Vertex& vx : v.vertices) {
    if (vx.A.rows() != n || vx.A.cols() != n || vx.B2.rows() != n ||
        vx.B2.cols() != m) {
      throw InvalidInput("vertex dimensions do not match the plant");
    }
    Matrix f = Matrix::Zero(p, p);
    f.topLeftCorner(n, n) = vx.A;
    f.topRightCorner(n, m) = -vx.B2;
    e.F.push_back(std::move(f));
  }
  e.vertices = v.vertices;
  return e;
}

SchurData build_schur(const ExtendedMatrices& e) {
  const Index n = e.n;
  const Index p = e.p;
  const Index r = e.m + 2 * n;

  SchurData s;
  s.n = n;
  s.m = e.m;
  s.p = p;
  s.r = r;

  Matrix h0 = Matrix::Zero(r, r);
  h0.bottomRightCorner(p, p).setIdentity();
  s.H0 = SymMatrix(h0);

  s.H2 = Matrix::Zero(p, r);
  s.H2.leftCols(n) = e.V.transpose();

  Matrix h3 = Matrix::Zero(r, r);
  h3.topLeftCorner(n, n) = -(e.V * e.Q.matrix() * e.V.transpose());
  s.H3 = SymMatrix(h3);

  s.tr_h3_sq = inner(s.H3, s.H3);
  s.h0_dot_h3 = inner(s.H0, s.H3);

  const Matrix h2h2t = s.H2 * s.H2.transpose();
  Matrix big = Matrix::Identity(p * p, p * p);
  s.H1.reserve(e.F.size());
  for (const Matrix& f : e.F) {
    Matrix h1(r, p);
    h1.topRows(n) = -(e.V * f);
    h1.bottomRows(p) = e.Rhalf.matrix();
    const Matrix h1th1 = h1.transpose() * h1;
    const Matrix h2h1 = s.H2 * h1;
    const Matrix h1th2t = h2h1.transpose();
    big += kron(h2h2t, h1th1) + kron(h2h1, h1th2t) + kron(h1th2t, h2h1) +
           kron(h1th1, h2h2t);
    s.H1.push_back(std::move(h1));
  }
  s.wsolve_matrix = SymMatrix(big);
  s.wsolve = SpdSolver(s.wsolve_matrix);
  return s;
}

SymMatrix eval_theta1(const ExtendedMatrices& e, std::size_t vertex,
                      const SymMatrix& w, double mu) {
  if (vertex >= e.num_vertices()) {
    throw InvalidInput(fmt::format("vertex {} out of range", vertex));
  }
  if (w.dim() != e.p) throw InvalidInput("W has the wrong dimension");
  const Index n = e.n;
  const Index m = e.m;
  const Matrix& a = e.vertices[vertex].A;
  const Matrix& b2 = e.vertices[vertex].B2;
  const Matrix w1 = w.matrix().topLeftCorner(n, n);
  const Matrix w2 = w.matrix().topRightCorner(n, m);

  const Matrix lin = a * w1 - b2 * w2.transpose();
  Matrix theta = lin + lin.transpose();
  theta += w1 * e.CtC.matrix() * w1;
  theta += w2 * e.DtD.matrix() * w2.transpose();
  theta += mu * e.B1B1t.matrix();
  return SymMatrix(theta);
}

SymMatrix eval_g(const SchurData& s, std::size_t vertex, const SymMatrix& w,
                 double mu) {
  if (vertex >= s.num_vertices()) {
    throw InvalidInput(fmt::format("vertex {} out of range", vertex));
  }
  if (w.dim() != s.p) throw InvalidInput("W has the wrong dimension");
  const Matrix t = s.H1[vertex] * w.matrix() * s.H2;
  return SymMatrix(t + t.transpose() + mu * s.H3.matrix() + s.H0.matrix());
}

}  // namespace hinf
