#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fpde/errors.hpp"
#include "fpde/linear.hpp"
#include "fpde/quasilinear.hpp"

namespace fpde {

/// Scenario file: flat typed key = value lines grouped under [section]
/// headers, '#' comments. Unknown sections or keys are rejected outright — a
/// misspelled key never silently falls back to a default.
struct ScenarioConfig {
  // [scenario]
  std::string solver;  // linear | quasilinear | fully-nonlinear
  std::string preset;
  std::string ic = "";  // named initial condition; empty = preset default
  std::string ic_file = "";
  double ic_amplitude = 1.0;
  std::uint64_t seed = 0;

  // [grid]
  int dim = 1;
  int n = 64;
  double period = 2.0 * std::numbers::pi;

  // [stepper]
  std::string scheme = "heun";
  double dt = 0.0;  // 0 = auto
  double cfl = 0.5;
  double t_end = 0.25;
  int snapshot_stride = 1;

  // [picard]
  double picard_tol = 1e-8;
  int picard_max_iters = 50;
  double picard_damping = 1.0;

  // [outer]
  double outer_tol = 1e-8;
  int outer_max_iters = 50;

  // [problem]
  std::optional<double> a0;
  std::optional<double> kappa0;
  std::optional<double> clamp_radius;
  std::map<std::string, std::string> coefficient_files;  // a,b0,b1,b2,f -> path

  // [output]
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_snapshots = false;
  bool emit_heatmaps = false;

  std::string raw_text;  // for the manifest hash

  StepperConfig stepper() const {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.cfl = cfl;
    cfg.scheme = scheme == "euler" ? Scheme::ExponentialEuler : Scheme::Heun;
    cfg.t_end = t_end;
    cfg.snapshot_stride = snapshot_stride;
    return cfg;
  }
  PicardConfig picard() const { return {picard_tol, picard_max_iters, picard_damping}; }
  PicardConfig outer() const { return {outer_tol, outer_max_iters, 1.0}; }
  Grid grid() const { return Grid(dim, n, period); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long long parse_int(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects a real, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("config: key '" + key + "' expects a real, got '" + v + "'");
  return out;
}

}  // namespace detail

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig c;
  c.raw_text = text;
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
      section = detail::trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"scenario", "grid", "stepper", "picard", "outer", "problem", "output"};
      if (!sections.count(section))
        throw ConfigError("config: unknown section [" + section + "] at line " + std::to_string(lineno));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config: empty key or value at line " + std::to_string(lineno));
    const std::string full = section + "." + key;
    if (seen.count(full)) throw ConfigError("config: duplicate key '" + full + "'");
    seen.insert(full);

    if (full == "scenario.solver") c.solver = val;
    else if (full == "scenario.preset") c.preset = val;
    else if (full == "scenario.ic") c.ic = val;
    else if (full == "scenario.ic_file") c.ic_file = val;
    else if (full == "scenario.ic_amplitude") c.ic_amplitude = detail::parse_real(val, full);
    else if (full == "scenario.seed") c.seed = static_cast<std::uint64_t>(detail::parse_int(val, full));
    else if (full == "grid.dim") c.dim = static_cast<int>(detail::parse_int(val, full));
    else if (full == "grid.n") c.n = static_cast<int>(detail::parse_int(val, full));
    else if (full == "grid.period") c.period = detail::parse_real(val, full);
    else if (full == "stepper.scheme") c.scheme = val;
    else if (full == "stepper.dt") c.dt = (val == "auto") ? 0.0 : detail::parse_real(val, full);
    else if (full == "stepper.cfl") c.cfl = detail::parse_real(val, full);
    else if (full == "stepper.t_end") c.t_end = detail::parse_real(val, full);
    else if (full == "stepper.snapshot_stride") c.snapshot_stride = static_cast<int>(detail::parse_int(val, full));
    else if (full == "picard.tol_sup") c.picard_tol = detail::parse_real(val, full);
    else if (full == "picard.max_iters") c.picard_max_iters = static_cast<int>(detail::parse_int(val, full));
    else if (full == "picard.damping") c.picard_damping = detail::parse_real(val, full);
    else if (full == "outer.tol_sup") c.outer_tol = detail::parse_real(val, full);
    else if (full == "outer.max_iters") c.outer_max_iters = static_cast<int>(detail::parse_int(val, full));
    else if (full == "problem.a0") c.a0 = detail::parse_real(val, full);
    else if (full == "problem.kappa0") c.kappa0 = detail::parse_real(val, full);
    else if (full == "problem.clamp_radius") c.clamp_radius = detail::parse_real(val, full);
    else if (full == "problem.a_file" || full == "problem.b0_file" || full == "problem.b1_file" ||
             full == "problem.b2_file" || full == "problem.f_file")
      c.coefficient_files[key.substr(0, key.size() - 5)] = val;
    else if (full == "output.dir") c.out_dir = val;
    else if (full == "output.emit") {
      c.emit_csv = c.emit_snapshots = c.emit_heatmaps = false;
      std::string rest = val;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = detail::trim(rest.substr(0, comma));
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        if (item == "csv") c.emit_csv = true;
        else if (item == "snapshots") c.emit_snapshots = true;
        else if (item == "heatmaps") c.emit_heatmaps = true;
        else throw ConfigError("config: unknown emit target '" + item + "'");
      }
    } else {
      throw ConfigError("config: unknown key '" + full + "' at line " + std::to_string(lineno));
    }
  }

  // Validation: reject before any output is produced.
  static const std::set<std::string> solvers = {"linear", "quasilinear", "fully-nonlinear"};
  if (!solvers.count(c.solver)) throw ConfigError("config: scenario.solver must be linear, quasilinear or fully-nonlinear");
  if (c.preset.empty()) throw ConfigError("config: scenario.preset is required");
  if (c.scheme != "euler" && c.scheme != "heun") throw ConfigError("config: stepper.scheme must be euler or heun");
  if (!(c.t_end > 0.0)) throw ConfigError("config: stepper.t_end must be positive");
  if (c.dt < 0.0) throw ConfigError("config: stepper.dt must be positive or auto");
  if (!(c.cfl > 0.0) || c.cfl > 1.0) throw ConfigError("config: stepper.cfl must lie in (0,1]");
  if (c.snapshot_stride < 1) throw ConfigError("config: stepper.snapshot_stride must be >= 1");
  if (c.a0 && !(*c.a0 > 0.0)) throw ConfigError("config: problem.a0 must be positive");
  if (!(c.picard_damping > 0.0) || c.picard_damping > 1.0)
    throw ConfigError("config: picard.damping must lie in (0,1]");
  if (!(c.picard_tol > 0.0) || !(c.outer_tol > 0.0)) throw ConfigError("config: tolerances must be positive");
  Grid check(c.dim, c.n, c.period);  // grid constraints
  (void)check;
  return c;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario_text(text);
}

/// FNV-1a over the raw config bytes; recorded in the run manifest.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fpde
