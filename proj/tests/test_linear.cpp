#include <catch2/catch_amalgamated.hpp>

#include "fpde/fpde.hpp"
#include "oracles.hpp"

using namespace fpde;
using Catch::Approx;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

LinearCoefficients const_coeffs(const Grid& g, double aval = 1.0) {
  LinearCoefficients c;
  c.a = [g, aval](double) { return ScalarField(g, aval); };
  c.b = [g](double) { return VectorField(g, g.dim()); };
  c.f = [g](double) { return ScalarField(g, 0.0); };
  c.a0 = aval;
  c.a1 = aval;
  return c;
}

LinearCoefficients smooth_var_coeffs(const Grid& g) {
  LinearCoefficients c;
  c.a = [g](double) {
    return ScalarField::sample(g, [](std::span<const double> x) { return 1.5 + 0.4 * std::sin(x[0]); });
  };
  c.b = [g](double) {
    std::vector<ScalarField> comps(static_cast<std::size_t>(g.dim()), ScalarField(g, 0.0));
    comps[0] = ScalarField::sample(g, [](std::span<const double> x) { return 0.3 * std::cos(x[0]); });
    return VectorField(std::move(comps));
  };
  c.f = [g](double) { return ScalarField(g, 0.0); };
  c.a0 = 1.1;
  c.a1 = 1.9;
  return c;
}

}  // namespace

TEST_CASE("constant-coefficient step collapses to the semigroup exactly") {
  Grid g(1, 64, kTwoPi);
  ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(3.0 * x[0]); });
  auto coeffs = const_coeffs(g);
  StepperConfig cfg;
  cfg.t_end = 1.0;
  for (Scheme s : {Scheme::ExponentialEuler, Scheme::Heun}) {
    cfg.scheme = s;
    ScalarField u1 = step_linear(u0, 0.0, 0.05, coeffs, cfg);
    ScalarField expect = std::exp(-0.05 * 3.0) * u0;
    CHECK(sup_norm(u1 - expect) < 1e-13);
  }
}

TEST_CASE("constant forcing integrates the mean exactly") {
  Grid g(1, 64, kTwoPi);
  const double c = 0.7;
  auto coeffs = const_coeffs(g);
  coeffs.f = [g, c](double) { return ScalarField(g, c); };
  StepperConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 0.3;
  for (Scheme s : {Scheme::ExponentialEuler, Scheme::Heun}) {
    cfg.scheme = s;
    Trajectory tr = solve_linear(ScalarField(g, 0.0), coeffs, cfg);
    for (std::size_t j = 0; j < tr.steps(); ++j)
      CHECK(tr.field(j, 0).mean() == Approx(c * tr.time(j)).margin(1e-12));
  }
}

TEST_CASE("one step against the exact propagator: scheme-order refinement") {
  // a = 1, b = const e1: the propagator is exact, so errors are pure time
  // discretization. Fixed horizon tau, taking 4 then 8 steps: the Heun error
  // must drop by >= 3.8x (second order), the Euler error by roughly 2x.
  Grid g(1, 64, kTwoPi);
  ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  const double bconst = 0.6, tau = 0.2;
  LinearCoefficients coeffs = const_coeffs(g);
  coeffs.b = [g, bconst](double) {
    return VectorField(std::vector<ScalarField>{ScalarField(g, bconst)});
  };
  std::vector<double> th{bconst};
  ScalarField exact = shifted_propagator(1.0, th, tau, 0.0, u0);

  auto run_err = [&](Scheme s, int nsteps) {
    StepperConfig cfg;
    cfg.scheme = s;
    cfg.t_end = tau;
    ScalarField u = u0;
    const double dt = tau / nsteps;
    for (int j = 0; j < nsteps; ++j) u = step_linear(u, j * dt, dt, coeffs, cfg);
    return sup_norm(u - exact);
  };
  const double heun_coarse = run_err(Scheme::Heun, 4);
  const double heun_fine = run_err(Scheme::Heun, 8);
  CHECK(heun_coarse / heun_fine >= 3.8);
  const double euler_coarse = run_err(Scheme::ExponentialEuler, 4);
  const double euler_fine = run_err(Scheme::ExponentialEuler, 8);
  CHECK(euler_coarse / euler_fine >= 1.8);
  // one-step local error of the Euler scheme is O(dt^2)
  StepperConfig ecfg;
  ecfg.scheme = Scheme::ExponentialEuler;
  ecfg.t_end = tau;
  const double e1 = sup_norm(step_linear(u0, 0.0, 0.05, coeffs, ecfg) -
                             shifted_propagator(1.0, th, 0.05, 0.0, u0));
  const double e2 = sup_norm(step_linear(u0, 0.0, 0.025, coeffs, ecfg) -
                             shifted_propagator(1.0, th, 0.025, 0.0, u0));
  CHECK(e1 / e2 >= 3.0);  // quadratic local truncation
}

TEST_CASE("zero data with zero forcing stays zero") {
  Grid g(1, 64, kTwoPi);
  StepperConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 0.2;
  Trajectory tr = solve_linear(ScalarField(g, 0.0), smooth_var_coeffs(g), cfg);
  for (std::size_t j = 0; j < tr.steps(); ++j) CHECK(sup_norm(tr.field(j, 0)) == 0.0);
}

TEST_CASE("maximum principle for f = 0 runs") {
  Grid g(1, 64, kTwoPi);
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  Trajectory tr = solve_linear(u0, smooth_var_coeffs(g), cfg);
  const auto sups = tr.diag.series("sup_norm");
  for (std::size_t i = 0; i < sups.size(); ++i) CHECK(sups[i] <= sups[0] + 1e-8 * sups[0]);
  // signed maxima are nonincreasing as well
  const auto maxes = tr.diag.series("max_value");
  for (std::size_t i = 1; i < maxes.size(); ++i) CHECK(maxes[i] <= maxes[0] + 1e-6 * sups[0]);
}

TEST_CASE("sup bound with general forcing") {
  Grid g(1, 64, kTwoPi);
  auto coeffs = smooth_var_coeffs(g);
  coeffs.f = [g](double t) {
    return ScalarField::sample(g, [t](std::span<const double> x) { return 0.4 * std::sin(x[0] + 2.0 * t); });
  };
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  Trajectory tr = solve_linear(u0, coeffs, cfg);
  const auto sups = tr.diag.series("sup_norm");
  const auto fint = tr.diag.series("f_sup_integral");
  for (std::size_t i = 0; i < sups.size(); ++i)
    CHECK(sups[i] <= sups[0] + fint[i] + 1e-6 * sups[0]);
}

TEST_CASE("self-convergence under joint grid and step refinement") {
  auto terminal = [&](int n, double dt) {
    Grid g(1, n, kTwoPi);
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 0.5;
    ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    Trajectory tr = solve_linear(u0, smooth_var_coeffs(g), cfg);
    return tr.field(tr.steps() - 1, 0);
  };
  ScalarField coarse = terminal(64, 2e-3);
  ScalarField fine = terminal(128, 1e-3);
  // compare on the coarse grid: the fine field restricted to every other node
  const Grid& gc = coarse.grid();
  std::vector<double> restricted(gc.total_points());
  for (int j = 0; j < gc.n(); ++j) restricted[static_cast<std::size_t>(j)] = fine[static_cast<std::size_t>(2 * j)];
  ScalarField fine_on_coarse(gc, std::move(restricted));
  CHECK(oracle::rel_l2(coarse, fine_on_coarse) <= 0.02);
}

TEST_CASE("solve is linear in the initial data and the forcing") {
  Grid g(1, 64, kTwoPi);
  auto coeffs = smooth_var_coeffs(g);
  StepperConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 0.2;
  ScalarField u0 = band_limited_field(g, 11, 8);
  ScalarField v0 = band_limited_field(g, 12, 8);
  const double al = 1.3, be = -0.8;
  Trajectory tu = solve_linear(u0, coeffs, cfg);
  Trajectory tv = solve_linear(v0, coeffs, cfg);
  Trajectory tw = solve_linear(al * u0 + be * v0, coeffs, cfg);
  const std::size_t last = tw.steps() - 1;
  ScalarField mix = al * tu.field(last, 0) + be * tv.field(last, 0);
  CHECK(sup_norm(tw.field(last, 0) - mix) <= 1e-10 * sup_norm(mix));

  // forcing splits off additively
  auto coeffs_f = coeffs;
  coeffs_f.f = [g](double) {
    return ScalarField::sample(g, [](std::span<const double> x) { return 0.2 * std::sin(2.0 * x[0]); });
  };
  Trajectory t_both = solve_linear(u0, coeffs_f, cfg);
  Trajectory t_f = solve_linear(ScalarField(g, 0.0), coeffs_f, cfg);
  ScalarField sum = tu.field(last, 0) + t_f.field(last, 0);
  CHECK(sup_norm(t_both.field(last, 0) - sum) <= 1e-10 * sup_norm(sum));
}

TEST_CASE("ellipticity violation aborts with a diagnostic") {
  Grid g(1, 64, kTwoPi);
  LinearCoefficients coeffs;
  coeffs.a = [g](double) {
    return ScalarField::sample(g, [](std::span<const double> x) { return 0.5 + std::sin(x[0]); });  // dips below 0
  };
  coeffs.b = [g](double) { return VectorField(g, 1); };
  coeffs.f = [g](double) { return ScalarField(g, 0.0); };
  coeffs.a0 = 0.4;
  coeffs.a1 = 1.6;
  StepperConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 0.1;
  CHECK_THROWS_AS(solve_linear(band_limited_field(g, 2, 5), coeffs, cfg), InvariantViolation);
}

TEST_CASE("divergent state aborts with the offending step index") {
  Grid g(1, 64, kTwoPi);
  auto coeffs = smooth_var_coeffs(g);
  StepperConfig cfg;
  cfg.dt = 50.0;  // far beyond the stability bound, the explicit remainder blows up
  cfg.t_end = 500.0;
  cfg.scheme = Scheme::ExponentialEuler;
  try {
    solve_linear(band_limited_field(g, 2, 10), coeffs, cfg);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("automatic step size respects the stability bound and completes") {
  Grid g(1, 64, kTwoPi);
  StepperConfig cfg;
  cfg.dt = 0.0;  // auto
  cfg.cfl = 0.5;
  cfg.t_end = 0.1;
  Trajectory tr = solve_linear(band_limited_field(g, 8, 8), smooth_var_coeffs(g), cfg);
  CHECK(tr.t_end() == Approx(0.1).margin(1e-12));
  const double dt = tr.time(1) - tr.time(0);
  // bound from the t = 0 coefficients: cfl * min(h/||b||, 1/(||a-abar|| ximax))
  const double h = g.spacing();
  const double bound = 0.5 * std::min(h / 0.3, 1.0 / (0.4 * g.xi_max()));
  CHECK(dt <= bound * 1.0001);
}
