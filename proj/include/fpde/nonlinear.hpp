#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpde/quasilinear.hpp"

namespace fpde {

/// The fully nonlinear problem d_t u = F(t, x, u, grad u, -(-Delta)^{1/2} u).
/// F and its four partials are user-supplied; a finite-difference cross-check
/// of the partials runs once at registration (no silent numerical
/// differentiation inside the solver).
struct NonlinearProblem {
  using XSpan = std::span<const double>;
  using Fn = std::function<double(double, XSpan, double, XSpan, double)>;
  using VecFn = std::function<void(double, XSpan, double, XSpan, double, std::span<double>)>;

  Fn F;        // (t, x, u, w, q) -> value
  Fn dF_dq;    // ellipticity coefficient, must stay >= a0
  Fn dF_du;
  VecFn grad_w_F;
  VecFn grad_x_F;
  double a0 = 0.0;
  std::optional<double> kappa0;  // growth constant: |F(t,x,u,0,0)| <= kappa0(|u|+1)
  bool depends_on_u = true;
  std::string name = "custom";
};

/// Residual series witnessing the gradient structure: h = grad u - w, the
/// antisymmetric part of grad w, and the equation residual of the stored run.
struct ConsistencyReport {
  std::vector<double> times;
  std::vector<double> h_residual;      // ||grad u - w||_inf
  std::vector<double> h_relative;      // relative to ||w||_inf
  std::vector<double> curl_residual;   // max_{i<j} ||d_i w_j - d_j w_i||_inf
  std::vector<double> pde_times;       // interior stored times
  std::vector<double> pde_residual;    // ||d_t u - F(...)||_2 by finite differences

  double max_h() const { return h_residual.empty() ? 0.0 : *std::max_element(h_residual.begin(), h_residual.end()); }
  double max_h_relative() const {
    return h_relative.empty() ? 0.0 : *std::max_element(h_relative.begin(), h_relative.end());
  }
  double max_curl() const {
    return curl_residual.empty() ? 0.0 : *std::max_element(curl_residual.begin(), curl_residual.end());
  }
  double terminal_h() const { return h_residual.empty() ? 0.0 : h_residual.back(); }
};

struct NonlinearResult {
  Trajectory u;
  Trajectory w;
  ConsistencyReport consistency;
  std::vector<double> outer_diffs;
  std::vector<double> inner_iterations;  // Picard sweep count per outer pass
  bool converged = false;
  bool gradient_consistency_ok = true;
  std::vector<std::string> invariant_failures;
};

namespace detail {

// Frozen outer iterate: u_{n-1}(t,x) and its gradient, recomputed lazily per
// time level. A null trajectory means the zero seed of the outer iteration.
struct FrozenState {
  const Trajectory* traj = nullptr;
  double t_cur = std::numeric_limits<double>::quiet_NaN();
  ScalarField u;
  VectorField grad_u;

  void ensure(double t) {
    if (!traj) return;
    if (t == t_cur) return;
    const std::size_t idx = traj->index_of(t);
    u = traj->field(idx, 0);
    grad_u = gradient(u);
    t_cur = t;
  }
  double value(double t, std::size_t i) {
    if (!traj) return 0.0;
    ensure(t);
    return u[i];
  }
  double grad_value(double t, std::size_t i, int axis) {
    if (!traj) return 0.0;
    ensure(t);
    return grad_u.comp(axis)[i];
  }
};

inline void fd_check_partials(const NonlinearProblem& p, int dim) {
  std::mt19937_64 rng(0xFD0FD0ull);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  std::uniform_real_distribution<double> td(0.0, 1.0);
  std::uniform_real_distribution<double> xd(0.0, 2.0 * std::numbers::pi);
  std::array<double, 3> x;
  std::vector<double> w(static_cast<std::size_t>(dim));
  std::vector<double> gw(static_cast<std::size_t>(dim));
  auto rel_check = [&](double analytic, double fd, const char* which) {
    if (std::abs(fd - analytic) > 1e-4 * std::abs(analytic) + 1e-7)
      throw InvariantViolation("nonlinear problem " + p.name + ": supplied partial " + which +
                               " disagrees with finite differences");
  };
  for (int s = 0; s < 100; ++s) {
    const double t = td(rng);
    for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = xd(rng);
    std::span<const double> xs(x.data(), static_cast<std::size_t>(dim));
    const double u = ud(rng);
    for (auto& v : w) v = ud(rng);
    const double q = ud(rng);
    std::span<const double> ws(w.data(), w.size());

    const double eps = 1e-5;
    {
      const double an = p.dF_dq(t, xs, u, ws, q);
      rel_check(an, (p.F(t, xs, u, ws, q + eps) - p.F(t, xs, u, ws, q - eps)) / (2 * eps), "dF_dq");
      if (an < p.a0 - 1e-12)
        throw InvariantViolation("nonlinear problem " + p.name + ": dF_dq below the ellipticity floor a0");
    }
    rel_check(p.dF_du(t, xs, u, ws, q),
              (p.F(t, xs, u + eps, ws, q) - p.F(t, xs, u - eps, ws, q)) / (2 * eps), "dF_du");
    p.grad_w_F(t, xs, u, ws, q, gw);
    for (int a = 0; a < dim; ++a) {
      auto wp = w, wm = w;
      wp[static_cast<std::size_t>(a)] += eps;
      wm[static_cast<std::size_t>(a)] -= eps;
      rel_check(gw[static_cast<std::size_t>(a)],
                (p.F(t, xs, u, wp, q) - p.F(t, xs, u, wm, q)) / (2 * eps), "grad_w_F");
    }
    p.grad_x_F(t, xs, u, ws, q, gw);
    for (int a = 0; a < dim; ++a) {
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(a)] += eps;
      xm[static_cast<std::size_t>(a)] -= eps;
      rel_check(gw[static_cast<std::size_t>(a)],
                (p.F(t, std::span<const double>(xp.data(), xs.size()), u, ws, q) -
                 p.F(t, std::span<const double>(xm.data(), xs.size()), u, ws, q)) /
                    (2 * eps),
                "grad_x_F");
    }
    if (p.kappa0) {
      std::vector<double> w0(static_cast<std::size_t>(dim), 0.0);
      const double f0 = p.F(t, xs, u, w0, 0.0);
      if (std::abs(f0) > *p.kappa0 * (std::abs(u) + 1.0) + 1e-9)
        throw InvariantViolation("nonlinear problem " + p.name +
                                 ": |F(t,x,u,0,0)| exceeds kappa0(|u|+1) at a sampled point");
    }
  }
}

}  // namespace detail

/// Registration-time validation: finite-difference cross-check of the supplied
/// partials, the ellipticity floor, and the kappa0 growth bound.
inline void validate_problem(const NonlinearProblem& p, int dim) { detail::fd_check_partials(p, dim); }

/// Solve the gradient system for w = grad u as a quasi-linear system with the
/// nonlocal argument q = (-Delta)^{-1/2} div w. When F depends on u, frozen_u
/// supplies the previous outer iterate (null = the zero seed).
inline QuasilinearResult solve_gradient_system(const ScalarField& phi, const Trajectory* frozen_u,
                                               const NonlinearProblem& prob, const PicardConfig& picard,
                                               const StepperConfig& cfg) {
  const Grid& g = phi.grid();
  const int d = g.dim();
  auto frozen = std::make_shared<detail::FrozenState>();
  frozen->traj = frozen_u;

  QuasilinearProblem qp;
  qp.m = d;
  qp.name = prob.name + "-gradient";
  qp.a0 = prob.a0;
  qp.zero_mean_forcing = true;
  MultiplierOp r_op = r_alpha(g, 1.0);
  qp.R_a = r_op;
  qp.R_b = r_op;
  qp.R_f = r_op;

  qp.a_fn = [&prob, frozen](double t, std::size_t i, auto xs, auto w, std::span<const double> r) {
    return prob.dF_dq(t, xs, frozen->value(t, i), w, r[0]);
  };
  qp.b_fn = [&prob, frozen, d](double t, std::size_t i, auto xs, auto w, std::span<const double> r,
                               std::span<double> out) {
    prob.grad_w_F(t, xs, frozen->value(t, i), w, r[0], out);
    for (int a = 0; a < d; ++a) out[static_cast<std::size_t>(a)] = -out[static_cast<std::size_t>(a)];
  };
  qp.f_fn = [&prob, frozen, d](double t, std::size_t i, auto xs, auto w, std::span<const double> r,
                               std::span<double> out) {
    prob.grad_x_F(t, xs, frozen->value(t, i), w, r[0], out);
    if (frozen->traj) {
      const double fu = prob.dF_du(t, xs, frozen->value(t, i), w, r[0]);
      for (int a = 0; a < d; ++a) out[static_cast<std::size_t>(a)] += fu * frozen->grad_value(t, i, a);
    }
  };

  VectorField w0 = gradient(phi);
  auto res = solve_quasilinear(w0.comps(), qp, picard, cfg);
  if (!res.converged)
    throw DivergenceError("solve_gradient_system " + prob.name +
                          ": inner Picard iteration did not converge within max_iters");
  return res;
}

/// u(t) = phi + time integral of F(s, x, u_frozen, w, R w) by trapezoid
/// quadrature at the stepper's resolution; u(0) = phi exactly.
inline Trajectory reconstruct_u(const ScalarField& phi, const Trajectory& w_traj,
                                const NonlinearProblem& prob, const Trajectory* frozen_u) {
  const Grid& g = phi.grid();
  const int d = g.dim();
  const std::size_t npts = g.total_points();
  MultiplierOp r_op = r_alpha(g, 1.0);
  detail::FrozenState frozen;
  frozen.traj = frozen_u;

  auto f_field = [&](std::size_t step) {
    const double t = w_traj.time(step);
    ScalarField rw = r_op.apply_to_vector(VectorField(w_traj.state(step)));
    std::vector<double> vals(npts);
    std::array<double, 3> x;
    std::vector<double> w(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < npts; ++i) {
      g.coords(i, x);
      for (int a = 0; a < d; ++a) w[static_cast<std::size_t>(a)] = w_traj.field(step, a)[i];
      vals[i] = prob.F(t, std::span<const double>(x.data(), static_cast<std::size_t>(d)),
                       frozen.value(t, i), w, rw[i]);
    }
    return ScalarField(g, std::move(vals));
  };

  Trajectory out(g, 1);
  ScalarField u = phi;
  out.append(w_traj.time(0), {u});
  ScalarField f_prev = f_field(0);
  for (std::size_t j = 0; j + 1 < w_traj.steps(); ++j) {
    const double dt = w_traj.time(j + 1) - w_traj.time(j);
    ScalarField f_next = f_field(j + 1);
    u = u + 0.5 * dt * (f_prev + f_next);
    out.append(w_traj.time(j + 1), {u});
    f_prev = std::move(f_next);
  }
  return out;
}

/// Residuals of the gradient structure for an aligned (u, w) pair.
inline ConsistencyReport check_consistency(const Trajectory& u_traj, const Trajectory& w_traj,
                                           const NonlinearProblem* prob = nullptr) {
  if (u_traj.steps() != w_traj.steps())
    throw ConfigError("check_consistency: trajectories have different step counts");
  const Grid& g = u_traj.grid();
  const int d = g.dim();
  ConsistencyReport rep;
  for (std::size_t j = 0; j < u_traj.steps(); ++j) {
    if (std::abs(u_traj.time(j) - w_traj.time(j)) > 1e-10)
      throw ConfigError("check_consistency: time stamps not aligned");
    VectorField gu = gradient(u_traj.field(j, 0));
    double h = 0.0, wsup = 0.0;
    for (int a = 0; a < d; ++a) {
      h = std::max(h, sup_norm(gu.comp(a) - w_traj.field(j, a)));
      wsup = std::max(wsup, sup_norm(w_traj.field(j, a)));
    }
    double curl = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        curl = std::max(curl, sup_norm(partial(w_traj.field(j, b), a) - partial(w_traj.field(j, a), b)));
    rep.times.push_back(u_traj.time(j));
    rep.h_residual.push_back(h);
    rep.h_relative.push_back(h / std::max(wsup, 1e-300));
    rep.curl_residual.push_back(curl);
  }
  if (prob && u_traj.steps() >= 3) {
    const std::size_t npts = g.total_points();
    std::array<double, 3> x;
    std::vector<double> w(static_cast<std::size_t>(d));
    for (std::size_t j = 1; j + 1 < u_traj.steps(); ++j) {
      const double span = u_traj.time(j + 1) - u_traj.time(j - 1);
      ScalarField dudt = (1.0 / span) * (u_traj.field(j + 1, 0) - u_traj.field(j - 1, 0));
      const ScalarField& u = u_traj.field(j, 0);
      VectorField gu = gradient(u);
      ScalarField q = -1.0 * half_laplacian(u);
      std::vector<double> vals(npts);
      for (std::size_t i = 0; i < npts; ++i) {
        g.coords(i, x);
        for (int a = 0; a < d; ++a) w[static_cast<std::size_t>(a)] = gu.comp(a)[i];
        vals[i] = dudt[i] - prob->F(u_traj.time(j), std::span<const double>(x.data(), static_cast<std::size_t>(d)),
                                    u[i], w, q[i]);
      }
      rep.pde_times.push_back(u_traj.time(j));
      rep.pde_residual.push_back(lp_norm(ScalarField(g, std::move(vals)), 2.0));
    }
  }
  return rep;
}

/// Outer iteration: freeze u_{n-1}, solve the gradient system for w_n,
/// reconstruct u_n, repeat until the sup distance of successive iterates drops
/// below tol. The final consistency report and the a-priori sup bound
/// (when kappa0 is supplied) are attached to the result.
inline NonlinearResult solve_fully_nonlinear(const ScalarField& phi, const NonlinearProblem& prob,
                                             const PicardConfig& outer, const PicardConfig& picard,
                                             const StepperConfig& cfg) {
  if (!phi.finite()) throw ConfigError("solve_fully_nonlinear: phi is not finite");
  validate_problem(prob, phi.grid().dim());

  NonlinearResult res;
  std::optional<Trajectory> u_prev;  // empty = the zero seed
  const int max_outer = prob.depends_on_u ? outer.max_iters : 1;
  for (int n = 1; n <= max_outer; ++n) {
    auto inner = solve_gradient_system(phi, u_prev ? &*u_prev : nullptr, prob, picard, cfg);
    Trajectory u_n = reconstruct_u(phi, inner.trajectory, prob, u_prev ? &*u_prev : nullptr);
    double diff;
    if (u_prev) {
      diff = Trajectory::sup_distance(u_n, *u_prev);
    } else {
      diff = 0.0;
      for (std::size_t j = 0; j < u_n.steps(); ++j) diff = std::max(diff, sup_norm(u_n.field(j, 0)));
    }
    res.outer_diffs.push_back(diff);
    res.inner_iterations.push_back(static_cast<double>(inner.sup_diffs.size()));
    res.w = std::move(inner.trajectory);
    u_prev = std::move(u_n);
    if (!prob.depends_on_u || diff < outer.tol_sup) {
      res.converged = true;
      break;
    }
  }
  res.u = std::move(*u_prev);
  res.consistency = check_consistency(res.u, res.w, &prob);
  if (res.consistency.max_h_relative() > 0.05) {
    res.gradient_consistency_ok = false;
    res.invariant_failures.push_back(
        "gradient-consistency failure: ||grad u - w||_inf reached " +
        std::to_string(res.consistency.max_h_relative()) + " relative (threshold 0.05)");
  }

  if (prob.kappa0) {
    const double k0 = *prob.kappa0;
    const double phisup = sup_norm(phi);
    double runsup = 0.0;
    for (std::size_t j = 0; j < res.u.steps(); ++j) runsup = std::max(runsup, sup_norm(res.u.field(j, 0)));
    const double bound = std::exp(k0) * (phisup + k0) + 1e-6;
    res.u.meta["kappa0_bound"] = bound;
    res.u.meta["run_sup"] = runsup;
    if (runsup > bound)
      throw InvariantViolation("solve_fully_nonlinear " + prob.name + ": sup bound exceeded, " +
                               std::to_string(runsup) + " > " + std::to_string(bound));
  }

  // Maximum principle inheritance: active only when F(t,x,u,0,0) <= 0 along the
  // realized range of u.
  {
    bool applies = true;
    const Grid& g = phi.grid();
    std::array<double, 3> x;
    std::vector<double> w0(static_cast<std::size_t>(g.dim()), 0.0);
    std::mt19937_64 rng(0x5eedull);
    std::uniform_int_distribution<std::size_t> xdist(0, g.total_points() - 1);
    for (std::size_t j = 0; j < res.u.steps() && applies; j += std::max<std::size_t>(res.u.steps() / 8, 1)) {
      for (int s = 0; s < 64 && applies; ++s) {
        const std::size_t i = xdist(rng);
        g.coords(i, x);
        if (prob.F(res.u.time(j), std::span<const double>(x.data(), static_cast<std::size_t>(g.dim())),
                   res.u.field(j, 0)[i], w0, 0.0) > 1e-12)
          applies = false;
      }
    }
    if (applies) {
      const double scale = std::max(1.0, sup_norm(phi));
      const double m0 = max_value(res.u.field(0, 0));
      for (std::size_t j = 0; j < res.u.steps(); ++j) {
        if (max_value(res.u.field(j, 0)) > m0 + 1e-6 * scale) {
          res.invariant_failures.push_back("maximum principle violated at t = " +
                                           std::to_string(res.u.time(j)));
          break;
        }
      }
    }
  }
  if (prob.depends_on_u && !res.converged)
    res.invariant_failures.push_back("outer iteration did not converge within max_iters");
  return res;
}

/// Named problem presets.
inline NonlinearProblem half_heat_problem() {
  NonlinearProblem p;
  p.name = "half-heat";
  p.F = [](double, auto, double, auto, double q) { return q; };
  p.dF_dq = [](double, auto, double, auto, double) { return 1.0; };
  p.dF_du = [](double, auto, double, auto, double) { return 0.0; };
  p.grad_w_F = [](double, auto, double, auto, double, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  p.grad_x_F = [](double, auto, double, auto, double, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  p.a0 = 1.0;
  p.kappa0 = 0.0;
  p.depends_on_u = false;
  return p;
}

/// F = q + sqrt(1 + |w|^2): the critical Hamilton-Jacobi class.
inline NonlinearProblem hj_critical_problem() {
  NonlinearProblem p = half_heat_problem();
  p.name = "hj-critical";
  p.F = [](double, auto, double, std::span<const double> w, double q) {
    double s = 1.0;
    for (double v : w) s += v * v;
    return q + std::sqrt(s);
  };
  p.grad_w_F = [](double, auto, double, std::span<const double> w, double, std::span<double> out) {
    double s = 1.0;
    for (double v : w) s += v * v;
    const double r = std::sqrt(s);
    for (std::size_t a = 0; a < w.size(); ++a) out[a] = w[a] / r;
  };
  p.kappa0 = 1.0;
  p.depends_on_u = false;
  return p;
}

/// F = q - u: dissipation plus linear reaction (closed-form single-mode solution).
inline NonlinearProblem reaction_problem() {
  NonlinearProblem p = half_heat_problem();
  p.name = "reaction";
  p.F = [](double, auto, double u, auto, double q) { return q - u; };
  p.dF_du = [](double, auto, double, auto, double) { return -1.0; };
  p.kappa0 = 1.0;
  p.depends_on_u = true;
  return p;
}

/// F = A(q) + H(w) + f(u) with A = a_slope q, H = h_scale sqrt(1+|w|^2),
/// f = -f_scale u.
inline NonlinearProblem remark_class_problem(double a_slope = 1.0, double h_scale = 1.0,
                                             double f_scale = 1.0,
                                             double kappa0 = std::numbers::sqrt2) {
  NonlinearProblem p;
  p.name = "remark-class";
  p.F = [=](double, auto, double u, std::span<const double> w, double q) {
    double s = 1.0;
    for (double v : w) s += v * v;
    return a_slope * q + h_scale * std::sqrt(s) - f_scale * u;
  };
  p.dF_dq = [=](double, auto, double, auto, double) { return a_slope; };
  p.dF_du = [=](double, auto, double, auto, double) { return -f_scale; };
  p.grad_w_F = [=](double, auto, double, std::span<const double> w, double, std::span<double> out) {
    double s = 1.0;
    for (double v : w) s += v * v;
    const double r = std::sqrt(s);
    for (std::size_t a = 0; a < w.size(); ++a) out[a] = h_scale * w[a] / r;
  };
  p.grad_x_F = [](double, auto, double, auto, double, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  p.a0 = a_slope;
  p.kappa0 = kappa0;
  p.depends_on_u = f_scale != 0.0;
  return p;
}

}  // namespace fpde
