#pragma once

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpde/cauchy_mc.hpp"
#include "fpde/nonlinear.hpp"
#include "fpde/random.hpp"
#include "fpde/semigroup.hpp"
#include "fpde/snapshot_io.hpp"

namespace fpde::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tol = 0.0;
  std::string note;
};

// Regression bounds measured once on this implementation and frozen.
// riesz_lp_ratio_bound: ||grad f||_p / ||(-Delta)^{1/2} f||_p over random
// band-limited fields stays within [1/C, C] for p in {1.5, 4}.
inline constexpr double riesz_lp_ratio_bound = 1.6;
// embedding constant: |f|_{C^{1-1/p}} <= C ||f||_{1,p} for p = 4 in 1D.
inline constexpr double embedding_c14_bound = 1.1;

namespace detail_v {

// Shared desk-scale runs, computed lazily and reused across checks.
struct Context {
  std::optional<QuasilinearResult> sqg;
  double sqg_phisup = 0.0, sqg_phil2 = 0.0, sqg_phimean = 0.0;
  std::optional<NonlinearResult> remark;
  double remark_phisup = 0.0;

  // cos(x)cos(y) alone is a steady mode of SQG transport (the velocity is
  // orthogonal to the gradient), so the desk scenario mixes in asymmetric modes
  // to exercise the coupling.
  const QuasilinearResult& sqg_run() {
    if (!sqg) {
      Grid g(2, 64, 2.0 * std::numbers::pi);
      ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) {
        return std::cos(x[0]) * std::cos(x[1]) + 0.5 * std::sin(x[0]) + 0.25 * std::cos(2.0 * x[0] + x[1]);
      });
      sqg_phisup = sup_norm(phi);
      sqg_phil2 = lp_norm(phi, 2.0);
      sqg_phimean = phi.mean();
      StepperConfig cfg;
      cfg.dt = 2e-3;
      cfg.t_end = 0.25;
      cfg.scheme = Scheme::Heun;
      cfg.snapshot_stride = 5;
      sqg = solve_quasilinear({phi}, sqg_problem(g), PicardConfig{}, cfg);
    }
    return *sqg;
  }

  const NonlinearResult& remark_run() {
    if (!remark) {
      Grid g(1, 64, 2.0 * std::numbers::pi);
      ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return 0.5 * std::cos(x[0]); });
      remark_phisup = sup_norm(phi);
      StepperConfig cfg;
      cfg.dt = 2e-3;
      cfg.t_end = 1.0;
      cfg.scheme = Scheme::Heun;
      remark = solve_fully_nonlinear(phi, remark_class_problem(), PicardConfig{}, PicardConfig{}, cfg);
    }
    return *remark;
  }
};

inline CheckResult make(const std::string& name, double measured, double tol, bool pass,
                        const std::string& note = "") {
  return {name, pass, measured, tol, note};
}

inline CheckResult bounded(const std::string& name, double measured, double tol, const std::string& note = "") {
  return make(name, measured, tol, measured <= tol, note);
}

}  // namespace detail_v

inline std::vector<CheckResult> run_checks(const std::string& selector = "") {
  using detail_v::bounded;
  using detail_v::make;
  detail_v::Context ctx;
  std::vector<CheckResult> results;
  auto want = [&](const std::string& name) {
    return selector.empty() || name.rfind(selector, 0) == 0 || name.find("/" + selector) != std::string::npos;
  };
  auto add = [&](const std::string& name, const std::function<CheckResult()>& fn) {
    if (!want(name)) return;
    try {
      results.push_back(fn());
    } catch (const std::exception& e) {
      results.push_back(make(name, 0.0, 0.0, false, std::string("exception: ") + e.what()));
    }
  };
  const double two_pi = 2.0 * std::numbers::pi;

  // --- operators ---------------------------------------------------------
  add("operators/roundtrip", [&] {
    double worst = 0.0;
    for (int d = 1; d <= 3; ++d) {
      Grid g(d, 32, two_pi);
      ScalarField f = band_limited_field(g, 11 + static_cast<unsigned>(d), 5);
      ScalarField back = ScalarField::from_spectral(g, f.spectral());
      worst = std::max(worst, sup_norm(back - f) / sup_norm(f));
    }
    return bounded("operators/roundtrip", worst, 1e-12);
  });
  add("operators/parseval", [&] {
    double worst = 0.0;
    for (int d = 1; d <= 3; ++d) {
      Grid g(d, 32, 5.0);
      ScalarField f = band_limited_field(g, 23 + static_cast<unsigned>(d), 5, 1.0, true);
      double phys = 0.0;
      for (double v : f.values()) phys += v * v;
      phys *= g.cell_volume();
      double spec = 0.0;
      for (const auto& c : f.spectral()) spec += std::norm(c);
      double ld = 1.0;
      for (int a = 0; a < d; ++a) ld *= g.period();
      worst = std::max(worst, std::abs(phys - ld * spec) / phys);
    }
    return bounded("operators/parseval", worst, 1e-12);
  });
  add("operators/multiplier-real", [&] {
    Grid g(1, 32, two_pi);
    bool threw = false;
    try {
      MultiplierOp bad(g, "bad", 1, 1, [](int, int, const auto& xt, const auto&) {
        return std::complex<double>(0.0, xt[0] * xt[0]);  // even imaginary: not conjugate-symmetric
      });
    } catch (const ConfigError&) {
      threw = true;
    }
    return make("operators/multiplier-real", threw ? 1.0 : 0.0, 1.0, threw,
                "construction rejects non-symmetric symbols");
  });
  add("operators/riesz-grad-identity", [&] {
    double worst = 0.0;
    for (int d = 1; d <= 3; ++d) {
      Grid g(d, 32, two_pi);
      MultiplierOp r1 = r_alpha(g, 1.0);
      for (int k = 0; k < 4; ++k) {
        ScalarField u = band_limited_field(g, 100 + static_cast<unsigned>(10 * d + k), 5);
        ScalarField lhs = -1.0 * half_laplacian(u);
        ScalarField rhs = r1.apply_to_vector(gradient(u));
        worst = std::max(worst, sup_norm(lhs - rhs) / sup_norm(u));
      }
    }
    return bounded("operators/riesz-grad-identity", worst, 1e-12);
  });
  add("operators/alpha-compose", [&] {
    Grid g(2, 32, two_pi);
    ScalarField f = band_limited_field(g, 7, 5);
    MultiplierOp half = fractional_laplacian(g, 0.5);
    ScalarField two = half.apply(half.apply(f));
    ScalarField one = half_laplacian(f);
    return bounded("operators/alpha-compose", sup_norm(two - one) / sup_norm(one), 1e-12);
  });
  add("operators/riesz-const-zero", [&] {
    Grid g(2, 32, two_pi);
    ScalarField c(g, 3.7);
    return bounded("operators/riesz-const-zero", sup_norm(riesz(g, 0).apply(c)), 1e-13);
  });
  add("operators/eigenfunction-halflap", [&] {
    Grid g(1, 64, two_pi);
    ScalarField f = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    return bounded("operators/eigenfunction-halflap", sup_norm(half_laplacian(f) - f), 1e-12);
  });
  add("operators/box-1d", [&] {
    Grid g(1, 64, two_pi);
    VectorField v(std::vector<ScalarField>{band_limited_field(g, 31, 10)});
    return bounded("operators/box-1d", sup_norm(box_op(v).comp(0)), 1e-12);
  });
  add("operators/box-div-zero", [&] {
    double worst = 0.0;
    for (int d = 2; d <= 3; ++d) {
      Grid g(d, 32, two_pi);
      std::vector<ScalarField> comps;
      for (int a = 0; a < d; ++a) comps.push_back(band_limited_field(g, 40 + static_cast<unsigned>(10 * d + a), 5));
      VectorField v(std::move(comps));
      worst = std::max(worst, sup_norm(divergence(box_op(v))) / sup_norm(v.magnitude()));
    }
    return bounded("operators/box-div-zero", worst, 1e-12);
  });
  add("operators/box-quadratic-form", [&] {
    Grid g(2, 32, two_pi);
    std::vector<ScalarField> comps{band_limited_field(g, 51, 5), band_limited_field(g, 52, 5)};
    VectorField v(std::move(comps));
    VectorField bv = box_op(v);
    const double w = g.cell_volume();
    double lhs = 0.0;
    for (int a = 0; a < 2; ++a)
      for (std::size_t i = 0; i < bv.comp(a).size(); ++i) lhs += bv.comp(a)[i] * v.comp(a)[i] * w;
    double grad2 = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double t = lp_norm(gradient(v.comp(a)).magnitude(), 2.0);
      grad2 += t * t;
    }
    const double div2 = std::pow(lp_norm(divergence(v), 2.0), 2.0);
    const double rhs = -grad2 + div2;
    return bounded("operators/box-quadratic-form", std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-30), 1e-10);
  });
  add("operators/riesz-l2-exact", [&] {
    Grid g(1, 64, two_pi);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      ScalarField f = band_limited_field(g, 800 + static_cast<unsigned>(k), 20);
      const double a = lp_norm(gradient(f).magnitude(), 2.0);
      const double b = lp_norm(half_laplacian(f), 2.0);
      worst = std::max(worst, std::abs(a - b) / b);
    }
    return bounded("operators/riesz-l2-exact", worst, 1e-12);
  });
  add("operators/riesz-lp-ratio", [&] {
    Grid g(1, 64, two_pi);
    double lo = 1e300, hi = 0.0;
    for (double p : {1.5, 4.0}) {
      for (int k = 0; k < 50; ++k) {
        ScalarField f = band_limited_field(g, 900 + static_cast<unsigned>(k), 10);
        const double ratio = lp_norm(gradient(f).magnitude(), p) / lp_norm(half_laplacian(f), p);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    const double c = riesz_lp_ratio_bound;
    const bool pass = lo >= 1.0 / c && hi <= c;
    return make("operators/riesz-lp-ratio", std::max(hi, 1.0 / lo), c, pass,
                "ratio range over 50 fields, p in {1.5,4}");
  });
  add("operators/commutator-le1", [&] {
    // Discrete Le1: sum_z || L(f z_c) - (Lf) z_c ||_p^p h  vs
    // ||zeta||_{2,p}^p ||f||_p^{p/2} ||f||_{1,p}^{p/2}, stability across N.
    const double p = 2.0;
    std::vector<double> ratios;
    for (int n : {32, 64, 128}) {
      Grid g(1, n, two_pi);
      ScalarField zeta = ScalarField::sample(g, [](std::span<const double> x) {
        return std::exp(20.0 * (std::cos(x[0] - std::numbers::pi) - 1.0));
      });
      ScalarField f = band_limited_field(g, 77, 5);
      double lhs = 0.0;
      ScalarField lf = half_laplacian(f);
      for (int zi = 0; zi < n; ++zi) {
        const double shift = zi * g.spacing();
        ScalarField zz = ScalarField::sample(g, [&](std::span<const double> x) {
          return std::exp(20.0 * (std::cos(x[0] - std::numbers::pi - shift) - 1.0));
        });
        ScalarField comm = half_laplacian(pointwise(f, zz)) - pointwise(lf, zz);
        lhs += std::pow(lp_norm(comm, p), p) * g.spacing();
      }
      const double rhs = std::pow(sobolev_norm(zeta, 2.0, p), p) * std::pow(lp_norm(f, p), p / 2) *
                         std::pow(sobolev_norm(f, 1.0, p), p / 2);
      ratios.push_back(lhs / rhs);
    }
    const double drift = *std::max_element(ratios.begin(), ratios.end()) /
                         *std::min_element(ratios.begin(), ratios.end());
    return bounded("operators/commutator-le1", drift, 2.0, "ratio drift across N=32,64,128");
  });
  add("operators/littlewood-paley-et3", [&] {
    const double p = 4.0;
    std::vector<double> worst_ratio;
    for (int n : {32, 64, 128}) {
      Grid g(1, n, two_pi);
      double hi = 0.0;
      for (int k = 0; k < 20; ++k) {
        ScalarField f = band_limited_field(g, 600 + static_cast<unsigned>(k), 8);
        // u(t) = int_0^t P_{t-s} f ds, spectrally f_k (1 - e^{-t|xi|})/|xi|.
        const int nt = 32;
        double num = 0.0;
        for (int j = 1; j <= nt; ++j) {
          const double t = static_cast<double>(j) / nt;
          ScalarField gu = detail::apply_symbol(f, [t](const auto& xt, const auto& xd) {
            const double r = std::abs(xt[0]);
            const double mult = r > 0 ? (1.0 - std::exp(-t * r)) / r : t;
            return std::complex<double>(0.0, xd[0] * mult);
          });
          const double w = (j == nt) ? 0.5 : 1.0;
          num += w * std::pow(lp_norm(gu, p), p) / nt;
        }
        hi = std::max(hi, num / std::pow(lp_norm(f, p), p));
      }
      worst_ratio.push_back(hi);
    }
    const double drift = *std::max_element(worst_ratio.begin(), worst_ratio.end()) /
                         *std::min_element(worst_ratio.begin(), worst_ratio.end());
    return bounded("operators/littlewood-paley-et3", drift, 2.0, "constant drift across N=32,64,128");
  });

  // --- carre du champ -----------------------------------------------------
  add("carre/constant-annihilation", [&] {
    Grid g(1, 64, two_pi);
    ScalarField f = band_limited_field(g, 5, 10);
    ScalarField c(g, 2.5);
    return bounded("carre/constant-annihilation", sup_norm(carre_du_champ(f, c)), 1e-12);
  });
  add("carre/nonneg-diagonal", [&] {
    double worst = 0.0;  // most negative value, sign flipped
    for (int d = 1; d <= 2; ++d) {
      Grid g(d, 64, two_pi);
      for (int k = 0; k < 5; ++k) {
        ScalarField f = band_limited_field(g, 300 + static_cast<unsigned>(10 * d + k), g.n() / 6);
        ScalarField e = carre_du_champ(f, f);
        double most_neg = 0.0;
        for (double v : e.values()) most_neg = std::min(most_neg, v);
        const double s = sup_norm(f);
        worst = std::max(worst, -most_neg / (s * s));
      }
    }
    return bounded("carre/nonneg-diagonal", worst, 1e-8);
  });
  add("carre/symmetry", [&] {
    Grid g(2, 32, two_pi);
    ScalarField f = band_limited_field(g, 61, 5);
    ScalarField g2 = band_limited_field(g, 62, 5);
    return bounded("carre/symmetry", sup_norm(carre_du_champ(f, g2) - carre_du_champ(g2, f)), 1e-13);
  });

  // --- semigroup ----------------------------------------------------------
  add("semigroup/identity-t0", [&] {
    Grid g(2, 32, two_pi);
    ScalarField f = band_limited_field(g, 81, 5);
    return bounded("semigroup/identity-t0", sup_norm(cauchy_semigroup(1.0, 0.0, f) - f), 1e-13);
  });
  add("semigroup/single-mode", [&] {
    Grid g(1, 64, two_pi);
    ScalarField f = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(3.0 * x[0]); });
    ScalarField expect = ScalarField::sample(g, [](std::span<const double> x) {
      return std::exp(-0.7 * 3.0) * std::cos(3.0 * x[0]);
    });
    return bounded("semigroup/single-mode", sup_norm(cauchy_semigroup(1.0, 0.7, f) - expect), 1e-12);
  });
  add("semigroup/law", [&] {
    Grid g(2, 32, two_pi);
    ScalarField f = band_limited_field(g, 91, 5);
    ScalarField a = cauchy_semigroup(1.3, 0.45, cauchy_semigroup(1.3, 0.3, f));
    ScalarField b = cauchy_semigroup(1.3, 0.75, f);
    return bounded("semigroup/law", sup_norm(a - b), 1e-12);
  });
  add("semigroup/sup-contraction", [&] {
    Grid g(2, 32, two_pi);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      ScalarField f = band_limited_field(g, 120 + static_cast<unsigned>(k), 8);
      worst = std::max(worst, sup_norm(cauchy_semigroup(1.0, 0.2, f)) - sup_norm(f));
    }
    return bounded("semigroup/sup-contraction", worst, 1e-10);
  });
  add("semigroup/propagator-reduction", [&] {
    Grid g(2, 32, two_pi);
    ScalarField f = band_limited_field(g, 131, 5);
    std::vector<double> theta{0.0, 0.0};
    return bounded("semigroup/propagator-reduction",
                   sup_norm(shifted_propagator(0.8, theta, 0.6, 0.1, f) - cauchy_semigroup(0.8, 0.5, f)),
                   1e-13);
  });
  add("semigroup/propagator-transport", [&] {
    Grid g(1, 64, two_pi);
    ScalarField f = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    std::vector<double> theta{1.0};
    ScalarField moved = shifted_propagator(0.0, theta, std::numbers::pi / 2, 0.0, f);
    ScalarField expect = ScalarField::sample(g, [](std::span<const double> x) {
      return std::cos(x[0] - std::numbers::pi / 2);
    });
    return bounded("semigroup/propagator-transport", sup_norm(moved - expect), 1e-12);
  });
  add("semigroup/mc-semigroup", [&] {
    Grid g(1, 64, two_pi);
    ScalarField f = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    CauchySampler sampler(424242, 1);
    auto [est, se] = mc_semigroup(sampler, 1.0, 0.3, f, 100000);
    ScalarField exact = cauchy_semigroup(1.0, 0.3, f);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double diff = std::abs(est[i] - exact[i]);
      if (diff > 3.0 * se[i] + 1e-14) ++bad;
    }
    const double frac_bad = static_cast<double>(bad) / static_cast<double>(est.size());
    return bounded("semigroup/mc-semigroup", frac_bad, 0.01, "fraction of points with z > 3 at 1e5 samples");
  });

  // --- norms --------------------------------------------------------------
  add("norms/homogeneity", [&] {
    Grid g(1, 64, two_pi);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      ScalarField f = band_limited_field(g, 200 + static_cast<unsigned>(k), 10);
      const double c = 2.75;
      for (double p : {1.0, 2.0, 4.0})
        worst = std::max(worst, std::abs(lp_norm(c * f, p) - c * lp_norm(f, p)) / (c * lp_norm(f, p)));
      worst = std::max(worst, std::abs(holder_seminorm(c * f, 0.5) - c * holder_seminorm(f, 0.5)) /
                                  (c * holder_seminorm(f, 0.5)));
    }
    return bounded("norms/homogeneity", worst, 1e-10);
  });
  add("norms/triangle", [&] {
    Grid g(1, 64, two_pi);
    double worst = -1e300;
    for (int k = 0; k < 10; ++k) {
      ScalarField f = band_limited_field(g, 230 + static_cast<unsigned>(k), 10);
      ScalarField h = band_limited_field(g, 260 + static_cast<unsigned>(k), 10);
      for (double p : {1.0, 2.0, 4.0})
        worst = std::max(worst, lp_norm(f + h, p) - lp_norm(f, p) - lp_norm(h, p));
      worst = std::max(worst, sobolev_norm(f + h, 1.0, 2.0) - sobolev_norm(f, 1.0, 2.0) -
                                  sobolev_norm(h, 1.0, 2.0));
    }
    return bounded("norms/triangle", worst, 1e-10);
  });
  add("norms/ukp-identity", [&] {
    Grid g(2, 32, two_pi);
    ScalarField f = band_limited_field(g, 271, 5);
    double byhand = sup_norm(f);
    for (int a = 0; a < 2; ++a) byhand += sobolev_norm(partial(f, a), 1.0, 2.0);
    return bounded("norms/ukp-identity", std::abs(ukp_norm(f, 1, 2.0) - byhand), 0.0,
                   "definitional identity, exact");
  });
  add("norms/embedding-w1p", [&] {
    Grid g(1, 64, two_pi);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      ScalarField f = band_limited_field(g, 500 + static_cast<unsigned>(k), 10);
      worst = std::max(worst, holder_seminorm(f, 0.75) / sobolev_norm(f, 1.0, 4.0));
    }
    return bounded("norms/embedding-w1p", worst, embedding_c14_bound,
                   "holder_{3/4} <= C ||f||_{1,4}, frozen C");
  });

  // --- linear -------------------------------------------------------------
  add("linear/max-principle", [&] {
    Grid g(1, 64, two_pi);
    LinearCoefficients coeffs;
    coeffs.a = [g](double) {
      return ScalarField::sample(g, [](std::span<const double> x) { return 1.5 + 0.4 * std::sin(x[0]); });
    };
    coeffs.b = [g](double) {
      return VectorField(std::vector<ScalarField>{
          ScalarField::sample(g, [](std::span<const double> x) { return 0.3 * std::cos(x[0]); })});
    };
    coeffs.f = [g](double) { return ScalarField(g, 0.0); };
    coeffs.a0 = 1.1;
    coeffs.a1 = 1.9;
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    Trajectory tr = solve_linear(u0, coeffs, cfg);
    double worst = -1e300;
    const auto maxes = tr.diag.series("max_value");
    for (std::size_t i = 1; i < maxes.size(); ++i) worst = std::max(worst, maxes[i] - maxes[0]);
    return bounded("linear/max-principle", worst, 1e-6 * sup_norm(u0), "sup_x u(t) - sup_x u(0), f = 0");
  });
  add("linear/bound-ew8", [&] {
    Grid g(1, 64, two_pi);
    LinearCoefficients coeffs;
    coeffs.a = [g](double) { return ScalarField(g, 1.0); };
    coeffs.b = [g](double) { return VectorField(g, 1); };
    coeffs.f = [g](double t) {
      return ScalarField::sample(g, [t](std::span<const double> x) { return 0.3 * std::sin(x[0] + t); });
    };
    coeffs.a0 = 1.0;
    coeffs.a1 = 1.0;
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    Trajectory tr = solve_linear(u0, coeffs, cfg);
    double worst = -1e300;
    const auto sups = tr.diag.series("sup_norm");
    const auto fints = tr.diag.series("f_sup_integral");
    for (std::size_t i = 0; i < sups.size(); ++i)
      worst = std::max(worst, sups[i] - sups[0] - fints[i]);
    return bounded("linear/bound-ew8", worst, 1e-6 * sup_norm(u0),
                   "||u(t)|| <= ||u0|| + int ||f||_inf");
  });
  add("linear/superposition", [&] {
    Grid g(1, 64, two_pi);
    LinearCoefficients coeffs;
    coeffs.a = [g](double) {
      return ScalarField::sample(g, [](std::span<const double> x) { return 1.2 + 0.3 * std::sin(x[0]); });
    };
    coeffs.b = [g](double) {
      return VectorField(std::vector<ScalarField>{
          ScalarField::sample(g, [](std::span<const double> x) { return 0.2 * std::cos(2.0 * x[0]); })});
    };
    coeffs.f = [g](double) { return ScalarField(g, 0.0); };
    coeffs.a0 = 0.9;
    coeffs.a1 = 1.5;
    StepperConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.2;
    ScalarField u0 = band_limited_field(g, 311, 8);
    ScalarField v0 = band_limited_field(g, 312, 8);
    const double al = 1.7, be = -0.6;
    Trajectory tu = solve_linear(u0, coeffs, cfg);
    Trajectory tv = solve_linear(v0, coeffs, cfg);
    Trajectory tw = solve_linear(al * u0 + be * v0, coeffs, cfg);
    const std::size_t last = tw.steps() - 1;
    ScalarField mix = al * tu.field(last, 0) + be * tv.field(last, 0);
    const double rel = sup_norm(tw.field(last, 0) - mix) / std::max(sup_norm(mix), 1e-30);
    return bounded("linear/superposition", rel, 1e-10);
  });
  add("linear/holder-monitor-th6", [&] {
    auto run = [&](int n, double dt) {
      Grid g(1, n, two_pi);
      LinearCoefficients coeffs;
      coeffs.a = [g](double) {
        return ScalarField::sample(g, [](std::span<const double> x) { return 1.5 + 0.4 * std::sin(x[0]); });
      };
      coeffs.b = [g](double) {
        return VectorField(std::vector<ScalarField>{
            ScalarField::sample(g, [](std::span<const double> x) { return 0.3 * std::cos(x[0]); })});
      };
      coeffs.f = [g](double) { return ScalarField(g, 0.0); };
      coeffs.a0 = 1.1;
      coeffs.a1 = 1.9;
      StepperConfig cfg;
      cfg.dt = dt;
      cfg.t_end = 0.5;
      cfg.snapshot_stride = 25;
      ScalarField u0 = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
      Trajectory tr = solve_linear(u0, coeffs, cfg);
      return tr.diag.series_max("holder_half");
    };
    const double coarse = run(64, 2e-3);
    const double fine = run(128, 1e-3);
    return bounded("linear/holder-monitor-th6", fine / coarse, 1.5,
                   "sup_t |u|_{C^{1/2}} growth under N=64 -> 128");
  });

  // --- quasilinear / SQG ---------------------------------------------------
  add("quasilinear/sqg-divfree", [&] {
    Grid g(2, 64, two_pi);
    ScalarField theta = band_limited_field(g, 777, 10);
    auto v = sqg_velocity(g).apply_to_scalar(theta);
    return bounded("quasilinear/sqg-divfree", sup_norm(divergence(v)) / sup_norm(theta), 1e-12);
  });
  add("quasilinear/sqg-mean", [&] {
    const auto& res = ctx.sqg_run();
    double worst = 0.0;
    for (std::size_t i = 0; i < res.trajectory.steps(); ++i)
      worst = std::max(worst, std::abs(res.trajectory.field(i, 0).mean() - ctx.sqg_phimean));
    return bounded("quasilinear/sqg-mean", worst, 1e-10);
  });
  add("quasilinear/sqg-max-principle", [&] {
    const auto& res = ctx.sqg_run();
    double worst = -1e300;
    const double s0 = sup_norm(res.trajectory.field(0, 0));
    for (std::size_t i = 0; i < res.trajectory.steps(); ++i)
      worst = std::max(worst, sup_norm(res.trajectory.field(i, 0)) - s0);
    return bounded("quasilinear/sqg-max-principle", worst, 1e-6 * ctx.sqg_phisup);
  });
  add("quasilinear/sqg-l2-decay", [&] {
    const auto& res = ctx.sqg_run();
    double worst = -1e300;
    for (std::size_t i = 1; i < res.trajectory.steps(); ++i) {
      const double dt = res.trajectory.time(i) - res.trajectory.time(i - 1);
      worst = std::max(worst, lp_norm(res.trajectory.field(i, 0), 2.0) -
                                  lp_norm(res.trajectory.field(i - 1, 0), 2.0) -
                                  1e-6 * ctx.sqg_phil2 * dt);
    }
    return bounded("quasilinear/sqg-l2-decay", worst, 0.0, "L2 nonincreasing up to slack");
  });
  add("quasilinear/picard-contraction", [&] {
    const auto& res = ctx.sqg_run();
    bool monotone = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 2; i < res.sup_diffs.size(); ++i) {
      const double r = res.sup_diffs[i] / res.sup_diffs[i - 1];
      worst_ratio = std::max(worst_ratio, r);
      if (res.sup_diffs[i] > res.sup_diffs[i - 1]) monotone = false;
    }
    return make("quasilinear/picard-contraction", worst_ratio, 0.9,
                res.converged && monotone && worst_ratio <= 0.9,
                "sup-difference ratios after iteration 2");
  });
  add("quasilinear/fixed-point", [&] {
    const auto& res = ctx.sqg_run();
    Grid g(2, 64, two_pi);
    ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) {
      return std::cos(x[0]) * std::cos(x[1]) + 0.5 * std::sin(x[0]) + 0.25 * std::cos(2.0 * x[0] + x[1]);
    });
    StepperConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.25;
    cfg.scheme = Scheme::Heun;
    Trajectory again = picard_step(res.trajectory, {phi}, sqg_problem(g), cfg);
    const double drift = Trajectory::sup_distance(again, res.trajectory);
    return bounded("quasilinear/fixed-point", drift, 2.0 * PicardConfig{}.tol_sup);
  });
  add("quasilinear/th2-bound", [&] {
    const auto& res = ctx.sqg_run();
    const double bound = res.trajectory.meta.at("th2_bound");
    const double supsq = res.trajectory.meta.at("th2_supsq");
    return bounded("quasilinear/th2-bound", supsq, bound + 1e-6, "sup_t ||u||^2 vs e^{C_f}(||phi||^2+C_f)");
  });

  // --- nonlinear ----------------------------------------------------------
  add("nonlinear/halfheat-max-principle", [&] {
    Grid g(1, 64, two_pi);
    ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.25;
    auto res = solve_fully_nonlinear(phi, half_heat_problem(), PicardConfig{}, PicardConfig{}, cfg);
    double worst = -1e300;
    const double m0 = max_value(res.u.field(0, 0));
    for (std::size_t i = 0; i < res.u.steps(); ++i)
      worst = std::max(worst, max_value(res.u.field(i, 0)) - m0);
    const bool clean = res.invariant_failures.empty();
    return make("nonlinear/halfheat-max-principle", worst, 1e-6 * sup_norm(phi),
                clean && worst <= 1e-6 * sup_norm(phi), "");
  });
  add("nonlinear/curl-1d", [&] {
    const auto& res = ctx.remark_run();
    return bounded("nonlinear/curl-1d", res.consistency.max_curl(), 1e-12);
  });
  add("nonlinear/kappa-bound", [&] {
    const auto& res = ctx.remark_run();
    return bounded("nonlinear/kappa-bound", res.u.meta.at("run_sup"), res.u.meta.at("kappa0_bound"));
  });
  add("nonlinear/outer-contraction", [&] {
    const auto& res = ctx.remark_run();
    bool eventually_monotone = true;
    double tail_ratio = 0.0;
    for (std::size_t i = 2; i < res.outer_diffs.size(); ++i) {
      const double r = res.outer_diffs[i] / res.outer_diffs[i - 1];
      tail_ratio = std::max(tail_ratio, r);
      if (r >= 1.0) eventually_monotone = false;
    }
    return make("nonlinear/outer-contraction", tail_ratio, 1.0, res.converged && eventually_monotone,
                "outer sup-difference ratios");
  });
  add("nonlinear/curl-growth-2d", [&] {
    Grid g(2, 32, two_pi);
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
    StepperConfig cfg;
    cfg.dt = 4e-3;
    cfg.t_end = 0.2;
    cfg.scheme = Scheme::ExponentialEuler;
    auto res = solve_fully_nonlinear(phi, p, PicardConfig{}, PicardConfig{}, cfg);
    const double init = std::max(res.consistency.curl_residual.front(), 1e-13 * sup_norm(phi));
    return bounded("nonlinear/curl-growth-2d", res.consistency.max_curl(), 10.0 * init,
                   "curl residual vs initial round-off");
  });
  add("nonlinear/h-residual-refinement", [&] {
    auto run = [&](int n, double dt) {
      Grid g(2, n, two_pi);
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
      StepperConfig cfg;
      cfg.dt = dt;
      cfg.t_end = 0.2;
      cfg.scheme = Scheme::ExponentialEuler;
      auto res = solve_fully_nonlinear(phi, p, PicardConfig{}, PicardConfig{}, cfg);
      return res.consistency.terminal_h();
    };
    const double coarse = run(32, 4e-3);
    const double fine = run(64, 2e-3);
    const double factor = coarse / fine;
    return make("nonlinear/h-residual-refinement", factor, 1.8, factor >= 1.8,
                "terminal ||grad u - w|| reduction under (h,dt) halving");
  });
  add("nonlinear/pde-residual-halving", [&] {
    auto run = [&](double dt) {
      Grid g(1, 64, two_pi);
      ScalarField phi = ScalarField::sample(g, [](std::span<const double> x) { return std::cos(x[0]); });
      StepperConfig cfg;
      cfg.dt = dt;
      cfg.t_end = 0.25;
      cfg.scheme = Scheme::ExponentialEuler;
      auto res = solve_fully_nonlinear(phi, reaction_problem(), PicardConfig{}, PicardConfig{}, cfg);
      double worst = 0.0;
      for (double v : res.consistency.pde_residual) worst = std::max(worst, v);
      return worst;
    };
    const double r = run(2e-3) / run(1e-3);
    return make("nonlinear/pde-residual-halving", r, 2.4, r >= 1.6 && r <= 2.4,
                "residual ratio under dt halving, first-order scheme");
  });

  // --- io -------------------------------------------------------------------
  add("io/snapshot-roundtrip", [&] {
    Grid g(2, 32, 5.5);
    ScalarField f = band_limited_field(g, 999, 5, 2.0, true);
    const std::string once = encode_snapshot(f);
    const std::string twice = encode_snapshot(decode_snapshot(once));
    return make("io/snapshot-roundtrip", once == twice ? 0.0 : 1.0, 0.0, once == twice,
                "bit-identical re-emission");
  });
  add("io/config-reject-unknown", [&] {
    bool threw = false;
    try {
      parse_scenario_text("[scenario]\nsolver = linear\npreset = const-coeff\ntypo_key = 1\n");
    } catch (const ConfigError&) {
      threw = true;
    }
    return make("io/config-reject-unknown", threw ? 1.0 : 0.0, 1.0, threw, "unknown keys rejected");
  });

  return results;
}

/// Print one machine-readable line per check; returns the number of failures.
inline int report(const std::vector<CheckResult>& results, std::FILE* out = stdout) {
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    std::fprintf(out, "%s %s measured=%.6g tol=%.6g%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                 r.measured, r.tol, r.note.empty() ? "" : " note=", r.note.c_str());
  }
  std::fprintf(out, "%d/%zu checks passed\n", static_cast<int>(results.size()) - failures, results.size());
  return failures;
}

}  // namespace fpde::verify
