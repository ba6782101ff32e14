// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>

#include "hinf/io.hpp"
#include "hinf/verify.hpp"

namespace hinf::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // verify: some check did not pass
inline constexpr int kExitSchema = 2;
inline constexpr int kExitAssumption = 3;
inline constexpr int kExitMaxIters = 4;
inline constexpr int kExitNumerical = 5;

/// Feasibility tolerance used by solve and verify reports.
inline constexpr double kFeasibilityTol = 1e-6;

struct Options {
  std::string problem;
  std::string gain;       // verify, simulate, sweep
  SolverOverrides solver; // flag overrides, beat the problem file
  std::string out;        // report / CSV path or trajectory prefix
  std::string history;    // solve: history CSV path
  double horizon = 5.0;
  double dt = 1e-3;
  std::optional<std::size_t> vertex;  // unset: nominal plant
  double fmin = kDefaultFmin;
  double fmax = kDefaultFmax;
  std::size_t npts = kDefaultNpts;
  bool full = false;
};

/// Each command writes its primary output to `opt.out` (or `out` when empty),
/// diagnostics to `err`, and returns a process exit code.
int cmd_solve(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_enumerate(const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace hinf::cli
