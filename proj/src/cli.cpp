// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#include "hinf/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "hinf/errors.hpp"
#include "hinf/problem.hpp"

namespace hinf::cli {
namespace {

struct Loaded {
  ProblemFile pf;
  VertexSet vertices;
};

Loaded load(const Options& opt, std::ostream& err) {
  ProblemFile pf = load_problem(opt.problem);
  for (const auto& w : validate_plant(pf.plant).warnings) {
    err << "warning: " << w << '\n';
  }
  VertexSet vs = enumerate_vertices(pf.plant, pf.uncertainty, pf.vertex_cap);
  return {std::move(pf), std::move(vs)};
}

// --vertex i, or the nominal plant when unset.
Vertex select_system(const Loaded& l, const std::optional<std::size_t>& idx) {
  if (!idx) return {l.pf.plant.A(), l.pf.plant.B2()};
  if (*idx >= l.vertices.size()) {
    throw InvalidInput(fmt::format("--vertex {} out of range (N = {})", *idx,
                                   l.vertices.size()));
  }
  return l.vertices.vertices[*idx];
}

void write_to(const std::string& path, std::ostream& fallback,
              const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidInput(fmt::format("cannot write {}", path));
  fn(f);
  if (!f) throw InvalidInput(fmt::format("error writing {}", path));
}

// Non-finite numbers have no JSON literal; they are reported as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json sweep_entry(const ClosedLoop& cl, const Options& opt,
                 std::vector<std::string>& warnings) {
  const double margin = stability_margin(cl);
  const SweepResult s = hinf_sweep(cl, opt.fmin, opt.fmax, opt.npts);
  warnings.insert(warnings.end(), s.warnings.begin(), s.warnings.end());
  return {{"vertex", cl.vertex},       {"margin", number(margin)},
          {"stable", margin < 0.0},    {"peak", number(s.peak)},
          {"peak_db", number(to_db(s.peak))},
          {"peak_frequency", number(s.peak_frequency)}};
}

Json feasibility_json(const FeasibilityReport& f) {
  Json rows = Json::array();
  for (const auto& v : f.vertices) {
    rows.push_back({{"vertex", v.vertex},
                    {"max_eig_theta", number(v.max_eig_theta)},
                    {"relative_violation", number(v.relative_violation)},
                    {"pass", v.pass}});
  }
  return {{"tol", f.tol},
          {"min_eig_W", number(f.min_eig_w)},
          {"mu_positive", f.mu_positive},
          {"all_pass", f.all_pass()},
          {"vertices", std::move(rows)}};
}

// Per-vertex and nominal sweeps of the closed loop under K.
Json sweeps_json(const Loaded& l, const Matrix& K, const Options& opt,
                 std::vector<std::string>& warnings, bool& all_stable,
                 double& worst_peak) {
  Json rows = Json::array();
  all_stable = true;
  worst_peak = 0.0;
  for (std::size_t i = 0; i < l.vertices.size(); ++i) {
    const ClosedLoop cl = closed_loop(l.pf.plant, l.vertices.vertices[i], i, K);
    Json row = sweep_entry(cl, opt, warnings);
    all_stable = all_stable && row["stable"].get<bool>();
    if (!row["peak"].is_null()) {
      worst_peak = std::max(worst_peak, row["peak"].get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const AssumptionViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

Json config_json(const SolverConfig& c) {
  return {{"sigma", c.sigma},
          {"tau", c.tau},
          {"eps", c.eps},
          {"max_iters", c.max_iters},
          {"parallel", c.parallel_projections}};
}

}  // namespace

int cmd_solve(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(opt, err);
    const SolverConfig cfg = l.pf.solver.merged_with(opt.solver).apply({});
    cfg.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const ExtendedMatrices e = build_extended(l.pf.plant, l.vertices);
    const SchurData s = build_schur(e);
    const Solution sol = solve(s, cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    std::vector<std::string> warnings;
    Json report = {{"status", to_string(sol.status)},
                   {"message", sol.message},
                   {"iters", sol.iters},
                   {"wall_time_seconds", wall},
                   {"num_vertices", l.vertices.size()},
                   {"config", config_json(cfg)},
                   {"mu_star", number(sol.mu_star)},
                   {"gamma_star", sol.gamma_star ? number(*sol.gamma_star)
                                                 : Json(nullptr)},
                   {"W_star", matrix_to_json(sol.w_star.matrix())},
                   {"K_star", sol.k_star ? matrix_to_json(*sol.k_star)
                                         : Json(nullptr)},
                   {"history", opt.history.empty() ? Json(nullptr)
                                                   : Json(opt.history)}};
    if (sol.w_star.matrix().allFinite() && std::isfinite(sol.mu_star)) {
      report["feasibility"] = feasibility_json(check_feasibility(
          e, sol.w_star, sol.mu_star, kFeasibilityTol,
          cfg.parallel_projections));
    }
    if (sol.k_star) {
      bool all_stable = false;
      double worst = 0.0;
      report["sweep"] =
          sweeps_json(l, *sol.k_star, opt, warnings, all_stable, worst);
      report["all_stable"] = all_stable;
      report["worst_vertex_peak"] = number(worst);
      const ClosedLoop nominal = closed_loop(
          l.pf.plant, {l.pf.plant.A(), l.pf.plant.B2()}, 0, *sol.k_star);
      report["nominal_sweep"] = sweep_entry(nominal, opt, warnings);
      report["nominal_sweep"].erase("vertex");
    }
    report["warnings"] = warnings;
    for (const auto& w : warnings) err << "warning: " << w << '\n';

    write_to(opt.out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    if (!opt.history.empty()) {
      write_to(opt.history, out,
               [&](std::ostream& os) { write_history_csv(os, sol.history); });
    }
    if (!sol.message.empty()) err << to_string(sol.status) << ": " << sol.message << '\n';
    switch (sol.status) {
      case SolveStatus::converged:
        return kExitOk;
      case SolveStatus::max_iters:
        return kExitMaxIters;
      case SolveStatus::numerical_failure:
        return kExitNumerical;
    }
    return kExitNumerical;
  });
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(opt, err);
    const GainFile g = load_gain(opt.gain);
    const Index p = l.pf.plant.n() + l.pf.plant.m();
    if (g.W && g.W->dim() != p) {
      throw InvalidInput(fmt::format("W is {0}x{0}, expected {1}x{1}",
                                     g.W->dim(), p));
    }

    std::vector<std::string> warnings;
    bool all_stable = false;
    double worst = 0.0;
    Json report = {{"num_vertices", l.vertices.size()},
                   {"K", matrix_to_json(g.K)}};
    report["sweep"] = sweeps_json(l, g.K, opt, warnings, all_stable, worst);
    report["all_stable"] = all_stable;
    report["worst_vertex_peak"] = number(worst);
    bool pass = all_stable;

    if (g.W) {
      const ExtendedMatrices e = build_extended(l.pf.plant, l.vertices);
      const FeasibilityReport f =
          check_feasibility(e, *g.W, *g.mu, kFeasibilityTol, true);
      report["feasibility"] = feasibility_json(f);
      report["mu"] = *g.mu;
      pass = pass && f.all_pass();
      if (*g.mu > 0.0) {
        const double gamma = 1.0 / std::sqrt(*g.mu);
        const bool bound_ok = worst <= gamma * (1.0 + 1e-2);
        report["gamma"] = gamma;
        report["norm_bound_ok"] = bound_ok;
        pass = pass && bound_ok;
      }
    }
    report["all_pass"] = pass;
    report["warnings"] = warnings;
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    write_to(opt.out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    return pass ? kExitOk : kExitCheckFailed;
  });
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opt.dt > 0.0)) {
      throw InvalidInput(fmt::format("--dt must be positive, got {}", opt.dt));
    }
    if (!(opt.horizon > 0.0)) {
      throw InvalidInput(
          fmt::format("--horizon must be positive, got {}", opt.horizon));
    }
    const Loaded l = load(opt, err);
    const GainFile g = load_gain(opt.gain);
    const ClosedLoop cl = closed_loop(l.pf.plant, select_system(l, opt.vertex),
                                      opt.vertex.value_or(0), g.K);
    if (stability_margin(cl) >= 0.0) {
      err << "warning: closed loop is not asymptotically stable\n";
    }
    const std::string prefix = opt.out.empty() ? "impulse" : opt.out;
    for (const Trajectory& tr : impulse_response(cl, opt.horizon, opt.dt)) {
      const std::string path = fmt::format("{}_w{}.csv", prefix, tr.channel + 1);
      std::ofstream f(path);
      if (!f) throw InvalidInput(fmt::format("cannot write {}", path));
      write_trajectory_csv(f, tr);
      out << path << '\n';
    }
    return kExitOk;
  });
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(opt, err);
    const GainFile g = load_gain(opt.gain);
    const ClosedLoop cl = closed_loop(l.pf.plant, select_system(l, opt.vertex),
                                      opt.vertex.value_or(0), g.K);
    const SweepResult s = hinf_sweep(cl, opt.fmin, opt.fmax, opt.npts);
    for (const auto& w : s.warnings) err << "warning: " << w << '\n';
    write_to(opt.out, out, [&](std::ostream& os) { write_sweep_csv(os, s); });
    return kExitOk;
  });
}

int cmd_enumerate(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(opt, err);
    write_to(opt.out, out, [&](std::ostream& os) {
      os << "N = " << l.vertices.size() << '\n';
      if (!opt.full) return;
      auto print = [&os](const char* name, const Matrix& m) {
        os << name << ":\n";
        for (Index r = 0; r < m.rows(); ++r) {
          std::string line = " ";
          for (Index c = 0; c < m.cols(); ++c) line += fmt::format(" {}", m(r, c));
          os << line << '\n';
        }
      };
      for (std::size_t i = 0; i < l.vertices.size(); ++i) {
        os << "vertex " << i << '\n';
        print("A", l.vertices.vertices[i].A);
        print("B2", l.vertices.vertices[i].B2);
      }
    });
    return kExitOk;
  });
}

}  // namespace hinf::cli
