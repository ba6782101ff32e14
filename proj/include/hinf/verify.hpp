// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hinf/kernels.hpp"
#include "hinf/model.hpp"
#include "hinf/problem.hpp"

namespace hinf {

/// Closed loop of one vertex under u = −Kx: Ac = Aᵢ − B₂ᵢK, Cc = C − DK.
struct ClosedLoop {
  Matrix Ac;
  Matrix Cc;
  Matrix B1;
  std::size_t vertex = 0;
};

/// Throws InvalidInput when K is not m×n.
ClosedLoop closed_loop(const PlantModel& plant, const Vertex& v,
                       std::size_t vertex_index, const Matrix& K);

/// Largest real part over the eigenvalues of Ac; negative iff stable.
double stability_margin(const ClosedLoop& cl);

struct SweepResult {
  std::vector<double> frequencies;  // rad/s, log-spaced
  std::vector<double> sigma_max;
  double peak = 0.0;
  double peak_frequency = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultFmin = 1e-3;
inline constexpr double kDefaultFmax = 1e4;
inline constexpr std::size_t kDefaultNpts = 2000;

/// σ_max of H(jω) = Cc(jωI − Ac)⁻¹B₁ at one frequency.
double sigma_max_at(const ClosedLoop& cl, double omega);

/**
 * σ_max[H(jω)] on `npts` log-spaced frequencies in [fmin, fmax]. The peak is
 * refined by golden-section search on log ω between the neighbours of the
 * grid maximizer, so it is never below the grid maximum.
 *
 * An unstable Ac only adds a warning. Frequencies where jωI − Ac is singular
 * are skipped with a warning.
 */
SweepResult hinf_sweep(const ClosedLoop& cl, double fmin = kDefaultFmin,
                       double fmax = kDefaultFmax,
                       std::size_t npts = kDefaultNpts);

struct VertexFeasibility {
  std::size_t vertex = 0;
  double max_eig_theta = 0.0;
  /// max eig Θ₁ᵢ / (1 + ‖Θ₁ᵢ‖_F), informational.
  double relative_violation = 0.0;
  bool pass = false;
};

struct FeasibilityReport {
  std::vector<VertexFeasibility> vertices;
  double min_eig_w = 0.0;
  bool mu_positive = false;
  double tol = 0.0;

  /// Every vertex passes and μ > 0.
  bool all_pass() const;
  double worst_max_eig() const;
};

/// Per-vertex λ_max(Θ₁ᵢ(W, μ)) against `tol`.
FeasibilityReport check_feasibility(const ExtendedMatrices& e,
                                    const SymMatrix& w, double mu, double tol,
                                    bool parallel = false);

/// Sampled states for one disturbance channel; states(k) is x(times[k]).
struct Trajectory {
  std::size_t channel = 0;
  std::vector<double> times;
  std::vector<Vector> states;
};

/**
 * Impulse response on each disturbance channel j, taken as the free
 * response of ẋ = Ac x from x(0) = B₁eⱼ. Fixed-step classical RK4 on
 * [0, horizon]; the last step is shortened to land on `horizon`.
 * Throws InvalidInput unless dt > 0 and horizon > 0.
 */
std::vector<Trajectory> impulse_response(const ClosedLoop& cl, double horizon,
                                         double dt);

}  // namespace hinf
