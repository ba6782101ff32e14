// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <fmt/format.h>

#include "hinf/errors.hpp"

namespace hinf {

SolverOverrides SolverOverrides::merged_with(const SolverOverrides& o) const {
  SolverOverrides r = *this;
  if (o.sigma) r.sigma = o.sigma;
  if (o.tau) r.tau = o.tau;
  if (o.eps) r.eps = o.eps;
  if (o.max_iters) r.max_iters = o.max_iters;
  if (o.parallel) r.parallel = o.parallel;
  return r;
}

SolverConfig SolverOverrides::apply(SolverConfig base) const {
  if (sigma) base.sigma = *sigma;
  if (tau) base.tau = *tau;
  if (eps) base.eps = *eps;
  if (max_iters) base.max_iters = *max_iters;
  if (parallel) base.parallel_projections = *parallel;
  return base;
}

namespace {

void reject_unknown_keys(const Json& obj, const std::set<std::string>& known,
                         const char* where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      throw SchemaError(
          fmt::format("{}: unknown key \"{}\"", where, item.key()));
    }
  }
}

double number_from_json(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(fmt::format("{}: expected a number", what));
  return j.get<double>();
}

// A nested array, or a single number broadcast to rows×cols.
Matrix fractions_from_json(const Json& j, Index rows, Index cols,
                           const char* what) {
  if (j.is_number()) return Matrix::Constant(rows, cols, j.get<double>());
  Matrix m = matrix_from_json(j, what);
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidInput(fmt::format("{} is {}x{}, expected {}x{}", what,
                                   m.rows(), m.cols(), rows, cols));
  }
  return m;
}

SolverOverrides solver_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("solver: expected an object");
  reject_unknown_keys(j, {"sigma", "tau", "eps", "max_iters", "parallel"},
                      "solver");
  SolverOverrides s;
  if (j.contains("sigma")) s.sigma = number_from_json(j["sigma"], "solver.sigma");
  if (j.contains("tau")) s.tau = number_from_json(j["tau"], "solver.tau");
  if (j.contains("eps")) s.eps = number_from_json(j["eps"], "solver.eps");
  if (j.contains("max_iters")) {
    if (!j["max_iters"].is_number_unsigned()) {
      throw SchemaError("solver.max_iters: expected a positive integer");
    }
    s.max_iters = j["max_iters"].get<std::size_t>();
  }
  if (j.contains("parallel")) {
    if (!j["parallel"].is_boolean()) {
      throw SchemaError("solver.parallel: expected true or false");
    }
    s.parallel = j["parallel"].get<bool>();
  }
  return s;
}

const Json& require(const Json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) {
    throw SchemaError(fmt::format("{}: missing key \"{}\"", where, key));
  }
  return obj[key];
}

}  // namespace

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(
        fmt::format("{}: expected a non-empty array of rows", what));
  }
  const auto rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.empty()) {
      throw SchemaError(fmt::format("{}: row {} is not a non-empty array", what, r));
    }
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw SchemaError(fmt::format("{}: ragged rows", what));
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) {
        throw SchemaError(
            fmt::format("{}: entry ({}, {}) is not a number", what, r, c));
      }
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

ProblemFile parse_problem(const Json& j) {
  if (!j.is_object()) throw SchemaError("problem: expected a JSON object");
  reject_unknown_keys(j,
                      {"name", "description", "A", "B1", "B2", "C", "D",
                       "uncertainty", "vertex_cap", "solver"},
                      "problem");
  PlantModel plant(matrix_from_json(require(j, "A", "problem"), "A"),
                   matrix_from_json(require(j, "B1", "problem"), "B1"),
                   matrix_from_json(require(j, "B2", "problem"), "B2"),
                   matrix_from_json(require(j, "C", "problem"), "C"),
                   matrix_from_json(require(j, "D", "problem"), "D"));

  UncertaintySpec unc = no_uncertainty(plant);
  if (j.contains("uncertainty")) {
    const Json& u = j["uncertainty"];
    if (!u.is_object() || u.size() != 1) {
      throw SchemaError(
          "uncertainty: expected exactly one of \"relative_bounds\" or "
          "\"vertices\"");
    }
    if (u.contains("relative_bounds")) {
      const Json& rb = u["relative_bounds"];
      if (!rb.is_object()) {
        throw SchemaError("uncertainty.relative_bounds: expected an object");
      }
      for (const char* key : {"B1", "C", "D"}) {
        if (rb.contains(key)) {
          throw SchemaError(fmt::format(
              "uncertainty.relative_bounds: uncertainty on {} is not "
              "supported, only A and B2 may vary",
              key));
        }
      }
      reject_unknown_keys(rb, {"A", "B2"}, "uncertainty.relative_bounds");
      RelativeBounds b = no_uncertainty(plant);
      if (rb.contains("A")) {
        b.delta_a = fractions_from_json(rb["A"], plant.n(), plant.n(),
                                        "relative_bounds.A");
      }
      if (rb.contains("B2")) {
        b.delta_b2 = fractions_from_json(rb["B2"], plant.n(), plant.m(),
                                         "relative_bounds.B2");
      }
      unc = b;
    } else if (u.contains("vertices")) {
      const Json& vs = u["vertices"];
      if (!vs.is_array() || vs.empty()) {
        throw SchemaError("uncertainty.vertices: expected a non-empty array");
      }
      std::vector<Vertex> list;
      for (const Json& v : vs) {
        if (!v.is_object()) {
          throw SchemaError("uncertainty.vertices: entries must be objects");
        }
        reject_unknown_keys(v, {"A", "B2"}, "uncertainty.vertices[]");
        list.push_back({matrix_from_json(require(v, "A", "vertex"), "vertex.A"),
                        matrix_from_json(require(v, "B2", "vertex"),
                                         "vertex.B2")});
      }
      unc = std::move(list);
    } else {
      throw SchemaError(
          "uncertainty: expected \"relative_bounds\" or \"vertices\"");
    }
  }

  std::size_t cap = kDefaultVertexCap;
  if (j.contains("vertex_cap")) {
    if (!j["vertex_cap"].is_number_unsigned() ||
        j["vertex_cap"].get<std::size_t>() == 0) {
      throw SchemaError("vertex_cap: expected a positive integer");
    }
    cap = j["vertex_cap"].get<std::size_t>();
  }
  SolverOverrides solver;
  if (j.contains("solver")) solver = solver_from_json(j["solver"]);
  return ProblemFile{std::move(plant), std::move(unc), cap, solver};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(fmt::format("cannot read {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ProblemFile load_problem(const std::filesystem::path& path) {
  return parse_problem(read_json(path));
}

GainFile parse_gain(const Json& j) {
  if (!j.is_object()) throw SchemaError("gain: expected a JSON object");
  const char* k_key = j.contains("K") ? "K" : "K_star";
  const char* w_key = j.contains("W") ? "W" : "W_star";
  const char* mu_key = j.contains("mu") ? "mu" : "mu_star";
  if (!j.contains(k_key) || j[k_key].is_null()) {
    throw SchemaError("gain: missing \"K\" (or \"K_star\")");
  }
  GainFile g;
  g.K = matrix_from_json(j[k_key], k_key);
  const bool has_w = j.contains(w_key) && !j[w_key].is_null();
  const bool has_mu = j.contains(mu_key) && !j[mu_key].is_null();
  if (has_w != has_mu) {
    throw SchemaError("gain: W and mu must be given together");
  }
  if (has_w) {
    const Matrix w = matrix_from_json(j[w_key], w_key);
    if (w.rows() != w.cols()) throw SchemaError("gain: W must be square");
    g.W = SymMatrix(w);
    g.mu = number_from_json(j[mu_key], mu_key);
  }
  return g;
}

GainFile load_gain(const std::filesystem::path& path) {
  return parse_gain(read_json(path));
}

double to_db(double x) { return 20.0 * std::log10(x); }

void write_history_csv(std::ostream& os,
                       const std::vector<IterationRecord>& history) {
  os << "k,err_W,err_mu,err_Y,err_eq,err,mu,gap\n";
  for (const auto& r : history) {
    os << fmt::format("{},{},{},{},{},{},{},{}\n", r.k, r.err_w, r.err_mu,
                      r.err_y, r.err_eq, r.err, r.mu, r.gap);
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << fmt::format("# peak sigma_max={} ({} dB) at omega_rad_s={}\n",
                    sweep.peak, to_db(sweep.peak), sweep.peak_frequency);
  os << "omega_rad_s,sigma_max,sigma_max_db\n";
  for (std::size_t k = 0; k < sweep.frequencies.size(); ++k) {
    os << fmt::format("{},{},{}\n", sweep.frequencies[k], sweep.sigma_max[k],
                      to_db(sweep.sigma_max[k]));
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const Index n = tr.states.empty() ? 0 : tr.states.front().size();
  std::string line = "t";
  for (Index i = 0; i < n; ++i) line += fmt::format(",x{}", i + 1);
  os << line << '\n';
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    line = fmt::format("{}", tr.times[k]);
    for (Index i = 0; i < n; ++i) line += fmt::format(",{}", tr.states[k](i));
    os << line << '\n';
  }
}

}  // namespace hinf
