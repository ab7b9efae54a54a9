#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fpde/quasilinear.hpp"
#include "fpde/random.hpp"

namespace fpde::bench {

struct Row {
  std::string kernel;
  int n = 0;
  int dim = 0;
  int reps = 0;
  double median_seconds = 0.0;
};

namespace detail_b {

template <typename Fn>
double median_time(Fn&& fn, int reps) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  fn();  // warm-up (plan creation etc.)
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace detail_b

/// Wall time of the core kernels on 2D grids: one multiplier application, one
/// linear Heun step, one full Picard sweep over a short SQG horizon.
inline std::vector<Row> run_bench(const std::string& kernel, const std::vector<int>& sizes, int reps = 7) {
  std::vector<Row> rows;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int n : sizes) {
    Grid g(2, n, two_pi);
    if (kernel == "multiplier" || kernel == "all") {
      ScalarField f = band_limited_field(g, 1, std::max(2, n / 6));
      MultiplierOp op = fractional_laplacian(g, 1.0);
      volatile double sink = 0.0;
      const double t = detail_b::median_time(
          [&] {
            ScalarField out = op.apply(f);
            sink = out[0];
          },
          reps);
      rows.push_back({"multiplier", n, 2, reps, t});
    }
    if (kernel == "step-linear" || kernel == "all") {
      LinearCoefficients coeffs;
      coeffs.a = [g](double) {
        return ScalarField::sample(g, [](std::span<const double> x) { return 1.2 + 0.3 * std::sin(x[0]); });
      };
      coeffs.b = [g](double) {
        return VectorField(std::vector<ScalarField>{
            ScalarField::sample(g, [](std::span<const double> x) { return 0.2 * std::cos(x[1]); }),
            ScalarField(g, 0.0)});
      };
      coeffs.f = [g](double) { return ScalarField(g, 0.0); };
      coeffs.a0 = 0.9;
      coeffs.a1 = 1.5;
      StepperConfig cfg;
      cfg.dt = 1e-3;
      ScalarField u = band_limited_field(g, 2, std::max(2, n / 6));
      volatile double sink = 0.0;
      const double t = detail_b::median_time(
          [&] {
            ScalarField out = step_linear(u, 0.0, 1e-3, coeffs, cfg);
            sink = out[0];
          },
          reps);
      rows.push_back({"step-linear", n, 2, reps, t});
    }
    if (kernel == "picard-step" || kernel == "all") {
      QuasilinearProblem prob = sqg_problem(g);
      StepperConfig cfg;
      cfg.dt = 2e-3;
      cfg.t_end = 8 * 2e-3;
      ScalarField phi = band_limited_field(g, 3, std::max(2, n / 6));
      std::vector<double> times(9);
      for (std::size_t j = 0; j < times.size(); ++j) times[j] = static_cast<double>(j) * 2e-3;
      Trajectory prev = Trajectory::zero(g, 1, times);
      volatile double sink = 0.0;
      const double t = detail_b::median_time(
          [&] {
            Trajectory tr = picard_step(prev, {phi}, prob, cfg);
            sink = tr.field(tr.steps() - 1, 0)[0];
          },
          reps);
      rows.push_back({"picard-step", n, 2, reps, t});
    }
  }
  return rows;
}

inline std::string to_csv(const std::vector<Row>& rows) {
  std::string out = "kernel,n,dim,reps,median_seconds\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.9g\n", r.kernel.c_str(), r.n, r.dim, r.reps,
                  r.median_seconds);
    out += buf;
  }
  // Record (not assert) the log-log scaling slope per kernel.
  std::vector<std::string> kernels;
  for (const auto& r : rows)
    if (std::find(kernels.begin(), kernels.end(), r.kernel) == kernels.end()) kernels.push_back(r.kernel);
  for (const auto& k : kernels) {
    std::vector<double> ln, lt;
    for (const auto& r : rows)
      if (r.kernel == k && r.median_seconds > 0.0) {
        ln.push_back(std::log(static_cast<double>(r.n)));
        lt.push_back(std::log(r.median_seconds));
      }
    if (ln.size() < 2) continue;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ln.size(); ++i) {
      mx += ln[i];
      my += lt[i];
    }
    mx /= static_cast<double>(ln.size());
    my /= static_cast<double>(ln.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < ln.size(); ++i) {
      num += (ln[i] - mx) * (lt[i] - my);
      den += (ln[i] - mx) * (ln[i] - mx);
    }
    std::snprintf(buf, sizeof(buf), "# loglog_slope %s %.3f\n", k.c_str(), num / den);
    out += buf;
  }
  return out;
}

}  // namespace fpde::bench
