#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fpde/calculus.hpp"
#include "fpde/semigroup.hpp"
#include "fpde/trajectory.hpp"

namespace fpde {

/// Time-dependent coefficients of  d_t u + a(t,x)(-Delta)^{1/2}u + b(t,x).grad u = f.
/// The ellipticity window [a0,a1] is checked on every accepted step.
struct LinearCoefficients {
  std::function<ScalarField(double)> a;
  std::function<VectorField(double)> b;
  std::function<ScalarField(double)> f;
  double a0 = 0.0;
  double a1 = std::numeric_limits<double>::infinity();
};

enum class Scheme { ExponentialEuler, Heun };

struct StepperConfig {
  double dt = 0.0;  // 0 selects the automatic CFL bound
  double cfl = 0.5;
  Scheme scheme = Scheme::Heun;
  double t_end = 1.0;
  int snapshot_stride = 1;
};

namespace detail {

// Explicit remainder G = f - (a - abar)(-Delta)^{1/2}u - b.grad u, with the
// variable-coefficient products dealiased in one pass.
inline ScalarField explicit_remainder(const ScalarField& u, const ScalarField& a, double abar,
                                      const VectorField& b, const ScalarField& f) {
  ScalarField lu = half_laplacian(u);
  VectorField gu = gradient(u);
  std::vector<double> acc(u.size());
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = (a[i] - abar) * lu[i];
  for (int c = 0; c < b.components(); ++c) {
    const auto& bc = b.comp(c);
    const auto& gc = gu.comp(c);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += bc[i] * gc[i];
  }
  return f - dealias(ScalarField(u.grid(), std::move(acc)));
}

inline void check_ellipticity(const ScalarField& a, double a0, double a1, const std::string& where) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : a.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo < a0 - 1e-12 * std::max(1.0, std::abs(a0)))
    throw InvariantViolation(where + ": ellipticity violated, min a = " + std::to_string(lo) +
                             " < a0 = " + std::to_string(a0));
  if (hi > a1 + 1e-12 * std::max(1.0, std::abs(a1)))
    throw InvariantViolation(where + ": coefficient bound violated, max a = " + std::to_string(hi) +
                             " > a1 = " + std::to_string(a1));
}

// One step with coefficient fields already evaluated at both ends. The stiff
// mean dissipation abar is integrated exactly by the semigroup; Heun corrects
// the remainder to second order (Lawson trapezoid).
inline ScalarField imex_step(const ScalarField& u, double dt, Scheme scheme, const ScalarField& a_t,
                             const VectorField& b_t, const ScalarField& f_t, const ScalarField& a_next,
                             const VectorField& b_next, const ScalarField& f_next) {
  const double abar = a_t.mean();
  ScalarField g_t = explicit_remainder(u, a_t, abar, b_t, f_t);
  ScalarField pred = cauchy_semigroup(abar, dt, u + dt * g_t);
  if (scheme == Scheme::ExponentialEuler) return pred;
  ScalarField g_next = explicit_remainder(pred, a_next, abar, b_next, f_next);
  return cauchy_semigroup(abar, dt, u + 0.5 * dt * g_t) + 0.5 * dt * g_next;
}

inline double auto_dt(const Grid& g, const ScalarField& a0field, const VectorField& b0field, double cfl) {
  const double eps = 1e-12;
  const double abar = a0field.mean();
  double adev = 0.0;
  for (double v : a0field.values()) adev = std::max(adev, std::abs(v - abar));
  const double bmax = sup_norm(b0field.magnitude());
  const double transport = g.spacing() / (bmax + eps);
  const double stiff = 1.0 / (adev * g.xi_max() + eps);
  return cfl * std::min(transport, stiff);
}

inline std::pair<double, std::size_t> time_grid(const StepperConfig& cfg, double dt_hint) {
  double dt = cfg.dt > 0.0 ? cfg.dt : dt_hint;
  if (!(dt > 0.0) || !(cfg.t_end > 0.0)) throw ConfigError("stepper: dt and t_end must be positive");
  const std::size_t n = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  return {cfg.t_end / static_cast<double>(std::max<std::size_t>(n, 1)), std::max<std::size_t>(n, 1)};
}

}  // namespace detail

/// One step of the linear equation from time t. Evaluates the coefficient
/// providers at both endpoints (Heun) and checks the ellipticity window.
inline ScalarField step_linear(const ScalarField& u, double t, double dt, const LinearCoefficients& coeffs,
                               const StepperConfig& cfg) {
  ScalarField a_t = coeffs.a(t);
  VectorField b_t = coeffs.b(t);
  ScalarField f_t = coeffs.f(t);
  detail::check_ellipticity(a_t, coeffs.a0, coeffs.a1, "step_linear");
  if (cfg.scheme == Scheme::ExponentialEuler)
    return detail::imex_step(u, dt, cfg.scheme, a_t, b_t, f_t, a_t, b_t, f_t);
  ScalarField a_n = coeffs.a(t + dt);
  VectorField b_n = coeffs.b(t + dt);
  ScalarField f_n = coeffs.f(t + dt);
  return detail::imex_step(u, dt, cfg.scheme, a_t, b_t, f_t, a_n, b_n, f_n);
}

/// Time-step the linear equation over [0, t_end]. States are stored at every
/// step; diagnostic norms are sampled every snapshot_stride steps.
inline Trajectory solve_linear(const ScalarField& u0, const LinearCoefficients& coeffs,
                               const StepperConfig& cfg) {
  if (!u0.finite()) throw ConfigError("solve_linear: initial value is not finite");
  const Grid& g = u0.grid();
  auto [dt, n_steps] = detail::time_grid(cfg, cfg.dt > 0.0 ? cfg.dt : detail::auto_dt(g, coeffs.a(0.0), coeffs.b(0.0), cfg.cfl));

  Trajectory tr(g, 1);
  tr.snapshot_stride = cfg.snapshot_stride;
  tr.diag.columns = {"sup_norm", "max_value", "l2_norm", "holder_half", "f_sup_integral"};

  double f_int = 0.0;
  double f_sup_prev = sup_norm(coeffs.f(0.0));
  auto record = [&](double t, const ScalarField& u) {
    tr.diag.add_row(t, {sup_norm(u), max_value(u), lp_norm(u, 2.0), holder_seminorm(u, 0.5), f_int});
  };

  ScalarField u = u0;
  tr.append(0.0, {u});
  record(0.0, u);
  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    u = step_linear(u, t, dt, coeffs, cfg);
    if (!u.finite())
      throw DivergenceError("solve_linear: non-finite state at step " + std::to_string(step + 1));
    const double f_sup = sup_norm(coeffs.f(t + dt));
    f_int += 0.5 * (f_sup_prev + f_sup) * dt;
    f_sup_prev = f_sup;
    tr.append(t + dt, {u});
    if ((step + 1) % static_cast<std::size_t>(std::max(cfg.snapshot_stride, 1)) == 0 || step + 1 == n_steps)
      record(t + dt, u);
  }
  return tr;
}

}  // namespace fpde
