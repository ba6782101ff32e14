// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "hinf/kernels.hpp"
#include "hinf/model.hpp"
#include "hinf/solver.hpp"
#include "hinf/verify.hpp"

namespace hinf {

using Json = nlohmann::json;

/// Solver settings a problem file may carry; unset fields keep defaults.
struct SolverOverrides {
  std::optional<double> sigma;
  std::optional<double> tau;
  std::optional<double> eps;
  std::optional<std::size_t> max_iters;
  std::optional<bool> parallel;

  /// Fields set in `o` replace fields set here.
  SolverOverrides merged_with(const SolverOverrides& o) const;
  SolverConfig apply(SolverConfig base) const;
};

struct ProblemFile {
  PlantModel plant;
  UncertaintySpec uncertainty;
  std::size_t vertex_cap = kDefaultVertexCap;
  SolverOverrides solver;
};

struct GainFile {
  Matrix K;
  std::optional<SymMatrix> W;
  std::optional<double> mu;
};

/// Row-major nested array. Throws SchemaError on anything else.
Matrix matrix_from_json(const Json& j, const char* what);
Json matrix_to_json(const Matrix& m);

/// Throw SchemaError on malformed content and InvalidInput on
/// inconsistent dimensions.
ProblemFile parse_problem(const Json& j);
ProblemFile load_problem(const std::filesystem::path& path);

/// Accepts {"K", "W"?, "mu"?} or a solve report with K_star, W_star, mu_star.
GainFile parse_gain(const Json& j);
GainFile load_gain(const std::filesystem::path& path);

/// Reads and parses a JSON file; SchemaError when unreadable or not JSON.
Json read_json(const std::filesystem::path& path);

/// Columns k, err_W, err_mu, err_Y, err_eq, err, mu, gap.
void write_history_csv(std::ostream& os,
                       const std::vector<IterationRecord>& history);

/// A "# peak ..." comment line, then omega_rad_s, sigma_max, sigma_max_db.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

/// Columns t, x1 … xn.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// 20·log10(x).
double to_db(double x);

}  // namespace hinf
