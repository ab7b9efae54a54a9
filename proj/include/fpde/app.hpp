#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fpde/bench.hpp"
#include "fpde/config.hpp"
#include "fpde/nonlinear.hpp"
#include "fpde/snapshot_io.hpp"
#include "fpde/verify.hpp"

namespace fpde::app {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_divergence = 3;
inline constexpr int exit_invariant = 4;

namespace detail_a {

inline ScalarField make_ic(const ScenarioConfig& c, const Grid& g) {
  if (!c.ic_file.empty()) {
    ScalarField f = read_snapshot(c.ic_file);
    if (f.grid() != g) throw ConfigError("ic_file grid does not match [grid] section");
    return c.ic_amplitude * f;
  }
  std::string name = c.ic;
  if (name.empty()) name = c.preset == "sqg" ? "coscos" : "cosx";
  const double k = 2.0 * std::numbers::pi / g.period();
  if (name == "cosx")
    return c.ic_amplitude * ScalarField::sample(g, [k](std::span<const double> x) { return std::cos(k * x[0]); });
  if (name == "halfcos")
    return 0.5 * c.ic_amplitude *
           ScalarField::sample(g, [k](std::span<const double> x) { return std::cos(k * x[0]); });
  if (name == "coscos")
    return c.ic_amplitude * ScalarField::sample(g, [k, &g](std::span<const double> x) {
             double v = 1.0;
             for (int a = 0; a < g.dim(); ++a) v *= std::cos(k * x[static_cast<std::size_t>(a)]);
             return v;
           });
  if (name == "random")
    return band_limited_field(g, c.seed, std::max(1, g.n() / 6), c.ic_amplitude);
  throw ConfigError("config: unknown ic '" + name + "'");
}

inline LinearCoefficients make_linear_coefficients(const ScenarioConfig& c, const Grid& g) {
  LinearCoefficients lc;
  if (c.preset == "const-coeff") {
    lc.a = [g](double) { return ScalarField(g, 1.0); };
    lc.b = [g](double) { return VectorField(g, g.dim()); };
    lc.f = [g](double) { return ScalarField(g, 0.0); };
    lc.a0 = 1.0;
    lc.a1 = 1.0;
  } else if (c.preset == "smooth-var") {
    const double k = 2.0 * std::numbers::pi / g.period();
    lc.a = [g, k](double) {
      return ScalarField::sample(g, [k](std::span<const double> x) { return 1.5 + 0.4 * std::sin(k * x[0]); });
    };
    lc.b = [g, k](double) {
      std::vector<ScalarField> comps(static_cast<std::size_t>(g.dim()), ScalarField(g, 0.0));
      comps[0] = ScalarField::sample(g, [k](std::span<const double> x) { return 0.3 * std::cos(k * x[0]); });
      return VectorField(std::move(comps));
    };
    lc.f = [g](double) { return ScalarField(g, 0.0); };
    lc.a0 = 1.1;
    lc.a1 = 1.9;
  } else if (c.preset == "from-files") {
    auto load = [&](const std::string& key) -> std::optional<ScalarField> {
      auto it = c.coefficient_files.find(key);
      if (it == c.coefficient_files.end()) return std::nullopt;
      ScalarField f = read_snapshot(it->second);
      if (f.grid() != g) throw ConfigError("coefficient file '" + it->second + "' grid mismatch");
      return f;
    };
    ScalarField a = load("a").value_or(ScalarField(g, 1.0));
    std::vector<ScalarField> bcomps;
    for (int ax = 0; ax < g.dim(); ++ax)
      bcomps.push_back(load("b" + std::to_string(ax)).value_or(ScalarField(g, 0.0)));
    ScalarField f = load("f").value_or(ScalarField(g, 0.0));
    double lo = 1e300, hi = -1e300;
    for (double v : a.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    lc.a0 = c.a0.value_or(lo);
    lc.a1 = hi;
    VectorField b(std::move(bcomps));
    lc.a = [a](double) { return a; };
    lc.b = [b](double) { return b; };
    lc.f = [f](double) { return f; };
    if (!(lc.a0 > 0.0)) throw ConfigError("from-files: coefficient a must be positive (set problem.a0)");
  } else {
    throw ConfigError("config: unknown linear preset '" + c.preset + "'");
  }
  return lc;
}

inline QuasilinearProblem make_quasilinear_problem(const ScenarioConfig& c, const Grid& g) {
  QuasilinearProblem p;
  if (c.preset == "sqg")
    p = sqg_problem(g);
  else if (c.preset == "frozen-burgers-1d")
    p = frozen_burgers_problem(g);
  else
    throw ConfigError("config: unknown quasilinear preset '" + c.preset + "'");
  if (c.clamp_radius) p.f_clamp_radius = *c.clamp_radius;
  if (c.a0) p.a0 = *c.a0;
  return p;
}

inline NonlinearProblem make_nonlinear_problem(const ScenarioConfig& c) {
  NonlinearProblem p;
  if (c.preset == "half-heat")
    p = half_heat_problem();
  else if (c.preset == "hj-critical")
    p = hj_critical_problem();
  else if (c.preset == "reaction")
    p = reaction_problem();
  else if (c.preset == "remark-class")
    p = remark_class_problem(c.a0.value_or(1.0), 1.0, 1.0,
                             c.kappa0.value_or(std::numbers::sqrt2));
  else
    throw ConfigError("config: unknown fully-nonlinear preset '" + c.preset + "'");
  return p;
}

inline DiagnosticsTable scenario_diag(const Trajectory& tr, const std::vector<double>* h_res) {
  DiagnosticsTable d;
  d.columns = {"sup_norm", "l2_norm", "holder_half"};
  if (h_res) d.columns.push_back("h_residual");
  const std::size_t stride = static_cast<std::size_t>(std::max(tr.snapshot_stride, 1));
  for (std::size_t i = 0; i < tr.steps(); ++i) {
    if (i % stride != 0 && i + 1 != tr.steps()) continue;
    double sup = 0.0;
    for (int cidx = 0; cidx < tr.components(); ++cidx) sup = std::max(sup, sup_norm(tr.field(i, cidx)));
    ScalarField mag = tr.components() == 1 ? tr.field(i, 0) : VectorField(tr.state(i)).magnitude();
    std::vector<double> row{sup, lp_norm(mag, 2.0), holder_seminorm(mag, 0.5)};
    if (h_res) row.push_back((*h_res)[i]);
    d.add_row(tr.time(i), row);
  }
  return d;
}

inline void emit_outputs(const ScenarioConfig& c, const std::string& dir, const Trajectory& tr,
                         const std::vector<double>* h_res) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string manifest;
  {
    char buf[128];
    manifest += "fpde_version " + std::string("1.0.0") + "\n";
    std::snprintf(buf, sizeof(buf), "config_hash %016llx\n",
                  static_cast<unsigned long long>(fnv1a(c.raw_text)));
    manifest += buf;
    manifest += "seed " + std::to_string(c.seed) + "\n";
    manifest += "solver " + c.solver + "\npreset " + c.preset + "\n";
    std::snprintf(buf, sizeof(buf), "grid dim=%d n=%d period=%.17g\n", c.dim, c.n, c.period);
    manifest += buf;
    manifest += "scheme " + c.scheme + "\n";
    std::snprintf(buf, sizeof(buf), "steps %zu\n", tr.steps() - 1);
    manifest += buf;
  }
  if (c.emit_csv) {
    std::ofstream out(dir + "/diagnostics.csv", std::ios::binary);
    out << scenario_diag(tr, h_res).to_csv();
  }
  const std::size_t stride = static_cast<std::size_t>(std::max(tr.snapshot_stride, 1));
  if (c.emit_snapshots || c.emit_heatmaps) {
    char name[64];
    for (std::size_t i = 0; i < tr.steps(); ++i) {
      if (i % stride != 0 && i + 1 != tr.steps()) continue;
      for (int cidx = 0; cidx < tr.components(); ++cidx) {
        if (c.emit_snapshots) {
          std::snprintf(name, sizeof(name), "/snap_%06zu_c%d.fpde", i, cidx);
          write_snapshot(dir + name, tr.field(i, cidx));
        }
        if (c.emit_heatmaps) {
          std::snprintf(name, sizeof(name), "/snap_%06zu_c%d.pgm", i, cidx);
          HeatmapInfo info = write_heatmap(dir + name, tr.field(i, cidx));
          char line[160];
          std::snprintf(line, sizeof(line), "heatmap snap_%06zu_c%d.pgm min=%.17g max=%.17g\n", i, cidx,
                        info.lo, info.hi);
          manifest += line;
        }
      }
    }
  }
  std::ofstream mout(dir + "/manifest.txt", std::ios::binary);
  mout << manifest;
}

inline std::string resolve_out_dir(const ScenarioConfig& c) {
  const char* root = std::getenv("FPDE_OUT_ROOT");
  if (root && *root) return std::string(root) + "/" + c.out_dir;
  return c.out_dir;
}

}  // namespace detail_a

/// Run one scenario end to end; returns the process exit code and writes
/// artifacts into the configured output directory.
inline int run_scenario(const std::string& config_path) {
  ScenarioConfig c;
  try {
    c = parse_scenario_file(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  }
  try {
    const Grid g = c.grid();
    const std::string dir = detail_a::resolve_out_dir(c);
    if (c.solver == "linear") {
      LinearCoefficients lc = detail_a::make_linear_coefficients(c, g);
      ScalarField u0 = detail_a::make_ic(c, g);
      Trajectory tr = solve_linear(u0, lc, c.stepper());
      detail_a::emit_outputs(c, dir, tr, nullptr);
    } else if (c.solver == "quasilinear") {
      QuasilinearProblem p = detail_a::make_quasilinear_problem(c, g);
      ScalarField phi = detail_a::make_ic(c, g);
      auto res = solve_quasilinear({phi}, p, c.picard(), c.stepper());
      detail_a::emit_outputs(c, dir, res.trajectory, nullptr);
      if (!res.converged) {
        std::fprintf(stderr, "solver did not converge within max_iters\n");
        return exit_divergence;
      }
    } else {
      NonlinearProblem p = detail_a::make_nonlinear_problem(c);
      ScalarField phi = detail_a::make_ic(c, g);
      auto res = solve_fully_nonlinear(phi, p, c.outer(), c.picard(), c.stepper());
      res.u.snapshot_stride = c.snapshot_stride;
      detail_a::emit_outputs(c, detail_a::resolve_out_dir(c), res.u, &res.consistency.h_residual);
      if (!res.converged) {
        std::fprintf(stderr, "outer iteration did not converge within max_iters\n");
        return exit_divergence;
      }
      if (!res.invariant_failures.empty()) {
        for (const auto& m : res.invariant_failures) std::fprintf(stderr, "invariant failure: %s\n", m.c_str());
        return exit_invariant;
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "solver divergence: %s\n", e.what());
    return exit_divergence;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return exit_invariant;
  }
  return exit_ok;
}

/// Print the header and the standard norms of a snapshot file.
inline int inspect(const std::string& path) {
  try {
    ScalarField f = read_snapshot(path);
    const Grid& g = f.grid();
    std::printf("dim %d\nn %d\nperiod %.17g\n", g.dim(), g.n(), g.period());
    std::printf("sup %.17g\nl2 %.17g\nmean %.17g\n", sup_norm(f), lp_norm(f, 2.0), f.mean());
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "inspect error: %s\n", e.what());
    return exit_config;
  }
  return exit_ok;
}

}  // namespace fpde::app
