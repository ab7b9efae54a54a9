#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpde/linear.hpp"
#include "fpde/multiplier.hpp"
#include "fpde/trajectory.hpp"

namespace fpde {

/// The quasi-linear system d_t u + a(u, R_a u)(-Delta)^{1/2} u + b(u, R_b u).grad u
/// = f(u, R_f u) for an m-component unknown. Coefficient callbacks receive the
/// time, the flat grid index, the coordinates, the state values and the
/// nonlocal values r = (R u)(t,x) of their own multiplier family.
struct QuasilinearProblem {
  using Point = std::span<const double>;

  int m = 1;
  std::function<double(double, std::size_t, Point, Point, Point)> a_fn;
  std::function<void(double, std::size_t, Point, Point, Point, std::span<double>)> b_fn;  // dim outputs
  std::function<void(double, std::size_t, Point, Point, Point, std::span<double>)> f_fn;  // m outputs
  std::optional<MultiplierOp> R_a, R_b, R_f;  // each k x m

  double a0 = 0.0;
  double a1 = std::numeric_limits<double>::infinity();
  double C_f = -1.0;  // growth constant of <u,f> <= C_f(|u|^2+1); negative = not supplied
  bool hypothesis_check = false;
  std::optional<double> f_clamp_radius;  // smooth cutoff chi_R on f, default off
  bool zero_mean_forcing = false;        // subtract (and log) the spatial mean of f
  std::string name = "custom";
};

struct PicardConfig {
  double tol_sup = 1e-8;
  int max_iters = 50;
  double damping = 1.0;
};

struct QuasilinearResult {
  Trajectory trajectory;
  std::vector<double> sup_diffs;
  bool converged = false;
};

namespace detail {

// Smooth cutoff: 1 on [0,R], 0 on [R+1,inf), cosine ramp between.
inline double clamp_chi(double s, double radius) {
  if (s <= radius) return 1.0;
  if (s >= radius + 1.0) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (s - radius)));
}

struct CoefficientFields {
  ScalarField a;
  VectorField b;
  std::vector<ScalarField> f;
};

inline std::vector<ScalarField> apply_family(const std::optional<MultiplierOp>& op,
                                             const std::vector<ScalarField>& state) {
  if (!op) return {};
  return op->apply(VectorField(state));
}

inline CoefficientFields evaluate_coefficients(const QuasilinearProblem& prob, const Trajectory& prev,
                                               double t, double* max_sub_mean) {
  const Grid& g = prev.grid();
  const std::size_t npts = g.total_points();
  const int d = g.dim();
  const std::size_t idx = prev.index_of(t);
  const auto& state = prev.state(idx);

  auto ra = apply_family(prob.R_a, state);
  auto rb = apply_family(prob.R_b, state);
  auto rf = apply_family(prob.R_f, state);

  std::vector<double> av(npts);
  std::vector<std::vector<double>> bv(static_cast<std::size_t>(d), std::vector<double>(npts));
  std::vector<std::vector<double>> fv(static_cast<std::size_t>(prob.m), std::vector<double>(npts));

  std::array<double, 3> x;
  std::vector<double> uvals(static_cast<std::size_t>(prob.m));
  std::vector<double> rvals_a(ra.size()), rvals_b(rb.size()), rvals_f(rf.size());
  std::vector<double> bout(static_cast<std::size_t>(d)), fout(static_cast<std::size_t>(prob.m));

  for (std::size_t i = 0; i < npts; ++i) {
    g.coords(i, x);
    std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
    double umag2 = 0.0;
    for (int c = 0; c < prob.m; ++c) {
      uvals[static_cast<std::size_t>(c)] = state[static_cast<std::size_t>(c)][i];
      umag2 += uvals[static_cast<std::size_t>(c)] * uvals[static_cast<std::size_t>(c)];
    }
    for (std::size_t k = 0; k < ra.size(); ++k) rvals_a[k] = ra[k][i];
    for (std::size_t k = 0; k < rb.size(); ++k) rvals_b[k] = rb[k][i];
    for (std::size_t k = 0; k < rf.size(); ++k) rvals_f[k] = rf[k][i];

    av[i] = prob.a_fn(t, i, xs, uvals, rvals_a);
    prob.b_fn(t, i, xs, uvals, rvals_b, bout);
    prob.f_fn(t, i, xs, uvals, rvals_f, fout);
    double chi = 1.0;
    if (prob.f_clamp_radius) chi = clamp_chi(std::sqrt(umag2), *prob.f_clamp_radius);
    for (int a = 0; a < d; ++a) bv[static_cast<std::size_t>(a)][i] = bout[static_cast<std::size_t>(a)];
    for (int c = 0; c < prob.m; ++c) fv[static_cast<std::size_t>(c)][i] = chi * fout[static_cast<std::size_t>(c)];
  }

  CoefficientFields out;
  out.a = ScalarField(g, std::move(av));
  std::vector<ScalarField> bf;
  bf.reserve(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) bf.emplace_back(g, std::move(bv[static_cast<std::size_t>(a)]));
  out.b = VectorField(std::move(bf));
  out.f.reserve(static_cast<std::size_t>(prob.m));
  for (int c = 0; c < prob.m; ++c) {
    ScalarField fc(g, std::move(fv[static_cast<std::size_t>(c)]));
    if (prob.zero_mean_forcing) {
      const double mu = fc.mean();
      if (max_sub_mean) *max_sub_mean = std::max(*max_sub_mean, std::abs(mu));
      fc = fc + (-mu);
    }
    out.f.push_back(std::move(fc));
  }
  return out;
}

// (EO2) spot check on realized states: <u, f(t,x,u,r)> <= C_f(|u|^2 + 1).
inline void check_growth_hypothesis(const QuasilinearProblem& prob, const Trajectory& prev, int iteration) {
  if (!prob.hypothesis_check || prob.C_f < 0.0) return;
  const Grid& g = prev.grid();
  std::mt19937_64 rng(0xC0FFEEull + static_cast<std::uint64_t>(iteration));
  std::uniform_int_distribution<std::size_t> tdist(0, prev.steps() - 1);
  std::uniform_int_distribution<std::size_t> xdist(0, g.total_points() - 1);
  std::array<double, 3> x;
  std::vector<double> uvals(static_cast<std::size_t>(prob.m));
  std::vector<double> fout(static_cast<std::size_t>(prob.m));
  for (int block = 0; block < 10; ++block) {
    const std::size_t ti = tdist(rng);
    const auto& state = prev.state(ti);
    auto rf = apply_family(prob.R_f, state);
    std::vector<double> rvals(rf.size());
    for (int s = 0; s < 100; ++s) {
      const std::size_t i = xdist(rng);
      g.coords(i, x);
      double u2 = 0.0;
      for (int c = 0; c < prob.m; ++c) {
        uvals[static_cast<std::size_t>(c)] = state[static_cast<std::size_t>(c)][i];
        u2 += uvals[static_cast<std::size_t>(c)] * uvals[static_cast<std::size_t>(c)];
      }
      for (std::size_t k = 0; k < rf.size(); ++k) rvals[k] = rf[k][i];
      prob.f_fn(prev.time(ti), i, std::span<const double>(x.data(), static_cast<std::size_t>(g.dim())),
                uvals, rvals, fout);
      double dot = 0.0;
      for (int c = 0; c < prob.m; ++c) dot += uvals[static_cast<std::size_t>(c)] * fout[static_cast<std::size_t>(c)];
      if (dot > prob.C_f * (u2 + 1.0) + 1e-9 * (u2 + 1.0))
        throw InvariantViolation("quasilinear " + prob.name + ": growth hypothesis <u,f> <= C_f(|u|^2+1) violated at iteration " +
                                 std::to_string(iteration));
    }
  }
}

}  // namespace detail

/// One Picard sweep: solve the linear system with all coefficients frozen along
/// the previous space-time iterate, starting from phi.
inline Trajectory picard_step(const Trajectory& u_prev, const std::vector<ScalarField>& phi,
                              const QuasilinearProblem& prob, const StepperConfig& cfg,
                              int iteration = 0) {
  const Grid& g = u_prev.grid();
  if (static_cast<int>(phi.size()) != prob.m) throw ConfigError("picard_step: phi component mismatch");
  if (u_prev.components() != prob.m) throw ConfigError("picard_step: trajectory component mismatch");

  Trajectory tr(g, prob.m);
  tr.snapshot_stride = cfg.snapshot_stride;
  std::vector<ScalarField> u = phi;
  tr.append(u_prev.time(0), u);

  double max_sub_mean = 0.0;
  auto coeffs_t = detail::evaluate_coefficients(prob, u_prev, u_prev.time(0), &max_sub_mean);
  const std::string where = "picard_step " + prob.name + " iteration " + std::to_string(iteration);
  for (std::size_t j = 0; j + 1 < u_prev.steps(); ++j) {
    const double t = u_prev.time(j);
    const double dt = u_prev.time(j + 1) - t;
    detail::check_ellipticity(coeffs_t.a, prob.a0, prob.a1, where);
    auto coeffs_next = detail::evaluate_coefficients(prob, u_prev, u_prev.time(j + 1), &max_sub_mean);
    for (int c = 0; c < prob.m; ++c) {
      u[static_cast<std::size_t>(c)] = detail::imex_step(
          u[static_cast<std::size_t>(c)], dt, cfg.scheme, coeffs_t.a, coeffs_t.b,
          coeffs_t.f[static_cast<std::size_t>(c)], coeffs_next.a, coeffs_next.b,
          coeffs_next.f[static_cast<std::size_t>(c)]);
      if (!u[static_cast<std::size_t>(c)].finite())
        throw DivergenceError(where + ": non-finite state at step " + std::to_string(j + 1));
    }
    coeffs_t = std::move(coeffs_next);
    tr.append(u_prev.time(j + 1), u);
  }
  tr.meta["max_subtracted_forcing_mean"] = max_sub_mean;
  return tr;
}

/// Picard iteration from the zero trajectory until successive iterates agree in
/// the sup norm. Never fails silently: the non-converged flag is part of the
/// result. Asserts the a-priori sup bound when C_f is supplied.
inline QuasilinearResult solve_quasilinear(const std::vector<ScalarField>& phi,
                                           const QuasilinearProblem& prob, const PicardConfig& picard,
                                           const StepperConfig& cfg) {
  if (static_cast<int>(phi.size()) != prob.m) throw ConfigError("solve_quasilinear: phi component mismatch");
  if (!(picard.tol_sup > 0.0)) throw ConfigError("solve_quasilinear: tol_sup must be positive");
  if (!(picard.damping > 0.0) || picard.damping > 1.0)
    throw ConfigError("solve_quasilinear: damping must lie in (0,1]");
  const Grid& g = phi.front().grid();
  for (const auto& c : phi)
    if (!c.finite()) throw ConfigError("solve_quasilinear: phi is not finite");

  // Fix the time grid once; every iterate shares it.
  double dt_hint = cfg.dt;
  if (!(dt_hint > 0.0)) {
    Trajectory seed = Trajectory::zero(g, prob.m, {0.0});
    auto c0 = detail::evaluate_coefficients(prob, seed, 0.0, nullptr);
    dt_hint = detail::auto_dt(g, c0.a, c0.b, cfg.cfl);
  }
  StepperConfig fixed = cfg;
  fixed.dt = dt_hint;
  auto [dt, n_steps] = detail::time_grid(fixed, dt_hint);
  std::vector<double> times(n_steps + 1);
  for (std::size_t j = 0; j <= n_steps; ++j) times[j] = static_cast<double>(j) * dt;
  times.back() = cfg.t_end;

  QuasilinearResult res;
  Trajectory prev = Trajectory::zero(g, prob.m, times);
  for (int n = 1; n <= picard.max_iters; ++n) {
    detail::check_growth_hypothesis(prob, prev, n);
    Trajectory next = picard_step(prev, phi, prob, fixed, n);
    if (picard.damping < 1.0) {
      Trajectory blended(g, prob.m);
      for (std::size_t j = 0; j < next.steps(); ++j) {
        std::vector<ScalarField> st;
        st.reserve(static_cast<std::size_t>(prob.m));
        for (int c = 0; c < prob.m; ++c)
          st.push_back((1.0 - picard.damping) * prev.field(j, c) + picard.damping * next.field(j, c));
        blended.append(next.time(j), std::move(st));
      }
      blended.meta = next.meta;
      blended.snapshot_stride = next.snapshot_stride;
      next = std::move(blended);
    }
    const double diff = Trajectory::sup_distance(next, prev);
    res.sup_diffs.push_back(diff);
    prev = std::move(next);
    if (diff < picard.tol_sup) {
      res.converged = true;
      break;
    }
  }
  res.trajectory = std::move(prev);

  if (prob.C_f >= 0.0) {
    double phisup = 0.0;
    for (const auto& c : phi) phisup = std::max(phisup, sup_norm(c));
    double runsup = 0.0;
    for (std::size_t j = 0; j < res.trajectory.steps(); ++j)
      for (int c = 0; c < prob.m; ++c) runsup = std::max(runsup, sup_norm(res.trajectory.field(j, c)));
    const double bound = std::exp(prob.C_f) * (phisup * phisup + prob.C_f);
    const double slack = 1e-6 * std::max(1.0, phisup * phisup);
    res.trajectory.meta["th2_bound"] = bound;
    res.trajectory.meta["th2_supsq"] = runsup * runsup;
    if (runsup * runsup > bound + slack)
      throw InvariantViolation("solve_quasilinear " + prob.name + ": sup bound exceeded, sup^2 = " +
                               std::to_string(runsup * runsup) + " > " + std::to_string(bound));
  }
  return res;
}

/// Critical SQG preset: a = 1, b = grad^perp (-Delta)^{-1/2} theta, f = 0.
inline QuasilinearProblem sqg_problem(const Grid& g) {
  if (g.dim() != 2) throw ConfigError("sqg preset: requires dim = 2");
  QuasilinearProblem p;
  p.m = 1;
  p.name = "sqg";
  p.R_b = sqg_velocity(g);
  p.a_fn = [](double, std::size_t, auto, auto, auto) { return 1.0; };
  p.b_fn = [](double, std::size_t, auto, auto, std::span<const double> r, std::span<double> out) {
    out[0] = r[0];
    out[1] = r[1];
  };
  p.f_fn = [](double, std::size_t, auto, auto, auto, std::span<double> out) { out[0] = 0.0; };
  p.a0 = 1.0;
  p.a1 = 1.0;
  p.C_f = 0.0;
  return p;
}

/// 1D drift-frozen Burgers: a = 1, b(u) = u (coefficient frozen at the previous
/// iterate), f = 0.
inline QuasilinearProblem frozen_burgers_problem(const Grid& g) {
  if (g.dim() != 1) throw ConfigError("frozen-burgers-1d preset: requires dim = 1");
  QuasilinearProblem p;
  p.m = 1;
  p.name = "frozen-burgers-1d";
  p.a_fn = [](double, std::size_t, auto, auto, auto) { return 1.0; };
  p.b_fn = [](double, std::size_t, auto, std::span<const double> u, auto, std::span<double> out) {
    out[0] = u[0];
  };
  p.f_fn = [](double, std::size_t, auto, auto, auto, std::span<double> out) { out[0] = 0.0; };
  p.a0 = 1.0;
  p.a1 = 1.0;
  p.C_f = 0.0;
  return p;
}

}  // namespace fpde
