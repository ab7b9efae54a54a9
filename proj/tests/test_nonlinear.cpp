#include <catch2/catch_amalgamated.hpp>

#include "fpde/fpde.hpp"
#include "oracles.hpp"

using namespace fpde;
using Catch::Approx;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

StepperConfig stepper(double dt, double t_end, Scheme s = Scheme::Heun) {
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.scheme = s;
  return cfg;
}

}  // namespace

TEST_CASE("registration cross-checks the supplied partials by finite differences") {
  CHECK_NOTHROW(validate_problem(half_heat_problem(), 2));
  CHECK_NOTHROW(validate_problem(hj_critical_problem(), 2));
  CHECK_NOTHROW(validate_problem(reaction_problem(), 1));
  CHECK_NOTHROW(validate_problem(remark_class_problem(), 1));

  NonlinearProblem broken = hj_critical_problem();
  broken.grad_w_F = [](double, auto, double, std::span<const double> w, double, std::span<double> out) {
    for (std::size_t a = 0; a < w.size(); ++a) out[a] = 0.3;  // wrong partial
  };
  CHECK_THROWS_AS(validate_problem(broken, 2), InvariantViolation);

  NonlinearProblem floor_violation = half_heat_problem();
  floor_violation.a0 = 2.0;  // dF_dq = 1 < 2
  CHECK_THROWS_AS(validate_problem(floor_violation, 1), InvariantViolation);

  NonlinearProblem bad_kappa = reaction_problem();
  bad_kappa.kappa0 = 0.1;  // |F(u,0,0)| = |u| can exceed 0.1(|u|+1)
  CHECK_THROWS_AS(validate_problem(bad_kappa, 1), InvariantViolation);
}

TEST_CASE("gradient system for F = q is the half-heat flow of grad phi") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) {
    return std::cos(x[0]) + 0.3 * std::sin(2.0 * x[0]);
  });
  auto res = solve_gradient_system(phi, nullptr, half_heat_problem(), PicardConfig{}, stepper(5e-3, 0.2));
  REQUIRE(res.converged);
  ScalarField w0 = gradient(phi).comp(0);
  for (std::size_t j = 0; j < res.trajectory.steps(); ++j) {
    ScalarField expect = cauchy_semigroup(1.0, res.trajectory.time(j), w0);
    CHECK(sup_norm(res.trajectory.field(j, 0) - expect) <= 1e-10);
  }
}

TEST_CASE("flat initial data with no x-forcing keeps w identically zero") {
  Grid g(2, 32, kTwoPi);
  ScalarField phi(g, 1.7);  // grad phi = 0
  auto res = solve_gradient_system(phi, nullptr, hj_critical_problem(), PicardConfig{}, stepper(5e-3, 0.1));
  REQUIRE(res.converged);
  for (std::size_t j = 0; j < res.trajectory.steps(); ++j)
    for (int c = 0; c < 2; ++c) CHECK(sup_norm(res.trajectory.field(j, c)) == 0.0);
}

TEST_CASE("hamilton-jacobi desk run converges with vanishing 1D curl residual") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return 0.5 * std::cos(x[0]); });
  auto res = solve_fully_nonlinear(phi, hj_critical_problem(), PicardConfig{}, PicardConfig{},
                                   stepper(2e-3, 0.25));
  REQUIRE(res.converged);
  CHECK(res.consistency.max_curl() <= 1e-8);
  CHECK(res.gradient_consistency_ok);
}

TEST_CASE("reconstruction: trapezoid on the exact flow reproduces the closed form") {
  // F = q, phi = cos: u(t) = e^{-t} cos x. Build w from the exact semigroup so
  // the only error is the trapezoid quadrature, O(dt^2).
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  ScalarField w0 = gradient(phi).comp(0);
  auto reconstruct_err = [&](double dt) {
    Trajectory w(g, 1);
    const auto n = static_cast<std::size_t>(std::llround(0.5 / dt));
    for (std::size_t j = 0; j <= n; ++j) {
      const double t = static_cast<double>(j) * dt;
      w.append(t, {cauchy_semigroup(1.0, t, w0)});
    }
    Trajectory u = reconstruct_u(phi, w, half_heat_problem(), nullptr);
    double worst = 0.0;
    for (std::size_t j = 0; j < u.steps(); ++j) {
      ScalarField expect = std::exp(-u.time(j)) * phi;
      worst = std::max(worst, sup_norm(u.field(j, 0) - expect));
    }
    return worst;
  };
  const double coarse = reconstruct_err(2e-2);
  const double fine = reconstruct_err(1e-2);
  CHECK(coarse <= 1e-4);
  CHECK(coarse / fine >= 3.0);  // quadratic in dt
  CHECK(coarse / fine <= 5.0);
}

TEST_CASE("reconstruction trivia: F = 0 keeps phi; F = q + 1 moves the mean linearly") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  Trajectory w(g, 1);
  for (int j = 0; j <= 20; ++j) w.append(0.01 * j, {cauchy_semigroup(1.0, 0.01 * j, gradient(phi).comp(0))});

  NonlinearProblem zero = half_heat_problem();
  zero.name = "zero";
  zero.F = [](double, auto, double, auto, double) { return 0.0; };
  zero.dF_dq = [](double, auto, double, auto, double) { return 1.0; };  // unused by reconstruction
  Trajectory u0 = reconstruct_u(phi, w, zero, nullptr);
  for (std::size_t j = 0; j < u0.steps(); ++j) CHECK(sup_norm(u0.field(j, 0) - phi) == 0.0);

  NonlinearProblem shifted = half_heat_problem();
  shifted.name = "shifted";
  shifted.F = [](double, auto, double, auto, double q) { return q + 1.0; };
  Trajectory u1 = reconstruct_u(phi, w, shifted, nullptr);
  for (std::size_t j = 0; j < u1.steps(); ++j)
    CHECK(u1.field(j, 0).mean() == Approx(phi.mean() + u1.time(j)).margin(1e-12));
}

TEST_CASE("F = q needs a single outer iteration") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  auto res = solve_fully_nonlinear(phi, half_heat_problem(), PicardConfig{}, PicardConfig{},
                                   stepper(1e-3, 0.25));
  REQUIRE(res.converged);
  CHECK(res.outer_diffs.size() == 1);
  // matches the closed-form half-heat solution to scheme order
  const std::size_t last = res.u.steps() - 1;
  ScalarField expect = std::exp(-res.u.time(last)) * phi;
  CHECK(oracle::rel_l2(res.u.field(last, 0), expect) <= 1e-4);
}

TEST_CASE("F = q - u against the closed-form decay e^{-2t} cos x") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  auto res = solve_fully_nonlinear(phi, reaction_problem(), PicardConfig{}, PicardConfig{},
                                   stepper(1e-3, 0.5));
  REQUIRE(res.converged);
  const std::size_t last = res.u.steps() - 1;
  ScalarField expect = std::exp(-2.0 * res.u.time(last)) * phi;
  CHECK(oracle::rel_l2(res.u.field(last, 0), expect) <= 0.01);
}

TEST_CASE("consistency report on an exact pair and time-stamp validation") {
  Grid g(2, 32, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) {
    return std::cos(x[0]) * std::cos(x[1]);
  });
  Trajectory u(g, 1), w(g, 2);
  for (int j = 0; j <= 10; ++j) {
    const double t = 0.01 * j;
    ScalarField ut = cauchy_semigroup(1.0, t, phi);
    u.append(t, {ut});
    VectorField gu = gradient(ut);
    w.append(t, {gu.comp(0), gu.comp(1)});
  }
  ConsistencyReport rep = check_consistency(u, w);
  CHECK(rep.max_h() <= 1e-12);
  CHECK(rep.max_curl() <= 1e-12);

  Trajectory w_bad(g, 2);
  for (int j = 0; j <= 10; ++j) {
    VectorField gu = gradient(cauchy_semigroup(1.0, 0.02 * j, phi));
    w_bad.append(0.02 * j, {gu.comp(0), gu.comp(1)});
  }
  CHECK_THROWS_AS(check_consistency(u, w_bad), ConfigError);
}

TEST_CASE("2D shear scenario: h residual contracts under joint refinement") {
  auto terminal_h = [&](int n, double dt) {
    Grid g(2, n, kTwoPi);
    ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) {
      return std::cos(x[0]) * std::cos(x[1]) + 0.3 * std::cos(2.0 * x[0]);
    });
    NonlinearProblem p = half_heat_problem();
    p.name = "shear";
    p.F = [](double, auto, double, std::span<const double> w, double q) { return q + 0.1 * w[0]; };
    p.grad_w_F = [](double, auto, double, std::span<const double> w, double, std::span<double> out) {
      out[0] = 0.1;
      for (std::size_t a = 1; a < w.size(); ++a) out[a] = 0.0;
    };
    auto res = solve_fully_nonlinear(phi, p, PicardConfig{}, PicardConfig{},
                                     stepper(dt, 0.2, Scheme::ExponentialEuler));
    return res.consistency.terminal_h();
  };
  const double coarse = terminal_h(32, 4e-3);
  const double fine = terminal_h(64, 2e-3);
  CHECK(coarse / fine >= 1.8);
}

TEST_CASE("kappa0 bound is recorded and honored on the remark-class preset") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return 0.5 * std::cos(x[0]); });
  auto res = solve_fully_nonlinear(phi, remark_class_problem(), PicardConfig{}, PicardConfig{},
                                   stepper(2e-3, 1.0));
  REQUIRE(res.converged);
  const double k0 = std::numbers::sqrt2;
  CHECK(res.u.meta.at("kappa0_bound") == Approx(std::exp(k0) * (0.5 + k0) + 1e-6).epsilon(1e-12));
  CHECK(res.u.meta.at("run_sup") <= res.u.meta.at("kappa0_bound"));
  CHECK(res.invariant_failures.empty());
}

TEST_CASE("maximum principle inheritance for dissipation-dominated F") {
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) {
    return std::cos(x[0]) + 0.2 * std::cos(3.0 * x[0]);
  });
  auto res = solve_fully_nonlinear(phi, half_heat_problem(), PicardConfig{}, PicardConfig{},
                                   stepper(1e-3, 0.25));
  REQUIRE(res.invariant_failures.empty());
  const double m0 = max_value(res.u.field(0, 0));
  for (std::size_t j = 0; j < res.u.steps(); ++j)
    CHECK(max_value(res.u.field(j, 0)) <= m0 + 1e-6 * sup_norm(phi));
}

TEST_CASE("pde residual is reported and first-order in dt") {
  auto worst_res = [&](double dt) {
    Grid g(1, 64, kTwoPi);
    ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    auto res = solve_fully_nonlinear(phi, reaction_problem(), PicardConfig{}, PicardConfig{},
                                     stepper(dt, 0.25, Scheme::ExponentialEuler));
    REQUIRE(!res.consistency.pde_residual.empty());
    double worst = 0.0;
    for (double v : res.consistency.pde_residual) worst = std::max(worst, v);
    return worst;
  };
  const double r = worst_res(2e-3) / worst_res(1e-3);
  CHECK(r >= 1.6);
  CHECK(r <= 2.4);
}

TEST_CASE("non-gradient x-forcing is subtracted from the mean and logged") {
  // grad_x F with a nonzero spatial mean cannot come from a periodic x-gradient;
  // the solver removes the mean so w stays mean-free and reports how much it took out.
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return 0.3 * std::cos(x[0]); });
  NonlinearProblem p = half_heat_problem();
  p.name = "tilted";
  p.F = [](double, std::span<const double> x, double, auto, double q) { return q + 0.3 * x[0]; };
  p.grad_x_F = [](double, auto, double, auto, double, std::span<double> out) { out[0] = 0.3; };
  auto inner = solve_gradient_system(phi, nullptr, p, PicardConfig{}, stepper(5e-3, 0.1));
  REQUIRE(inner.converged);
  CHECK(inner.trajectory.meta.at("max_subtracted_forcing_mean") == Approx(0.3).margin(1e-10));
  for (std::size_t j = 0; j < inner.trajectory.steps(); ++j)
    CHECK(std::abs(inner.trajectory.field(j, 0).mean()) <= 1e-10);
}

TEST_CASE("u-dependent outer iteration uses the frozen gradient forcing") {
  // for F = q - u the w-equation carries the forcing -grad u_{n-1}; after
  // convergence w must agree with grad u to the consistency tolerance
  Grid g(1, 64, kTwoPi);
  ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
  auto res = solve_fully_nonlinear(phi, reaction_problem(), PicardConfig{}, PicardConfig{},
                                   stepper(1e-3, 0.3));
  REQUIRE(res.converged);
  CHECK(res.outer_diffs.size() >= 2);
  CHECK(res.gradient_consistency_ok);
  CHECK(res.consistency.max_h_relative() <= 0.05);
}
