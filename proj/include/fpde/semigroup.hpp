#pragma once

#include <cmath>
#include <complex>
#include <span>

#include "fpde/calculus.hpp"
#include "fpde/field.hpp"

namespace fpde {

/// Cauchy semigroup P^lambda_t: spectral action e^{-lambda t |xi|}.
inline ScalarField cauchy_semigroup(double lambda, double t, const ScalarField& f) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("cauchy_semigroup: lambda must be >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("cauchy_semigroup: t must be >= 0");
  const int d = f.grid().dim();
  const double lt = lambda * t;
  return detail::apply_symbol(f, [lt, d](const auto& xt, const auto&) {
    return std::complex<double>(std::exp(-lt * detail::norm2(xt, d)), 0.0);
  });
}

/// Propagator of  d_t v + lambda (-Delta)^{1/2} v + theta . grad v = 0  over
/// [s,t] with constant lambda, theta: spectral factor
/// e^{-lambda(t-s)|xi|} e^{-i(t-s) theta . xi}.  The transport phase uses the
/// derivative wavenumbers, so a single mode is carried to cos(x - theta (t-s)).
/// Piecewise-constant coefficients are handled by composing steps.
inline ScalarField shifted_propagator(double lambda, std::span<const double> theta, double t, double s,
                                      const ScalarField& f) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("shifted_propagator: lambda must be >= 0");
  if (s > t) throw ConfigError("shifted_propagator: requires s <= t");
  const Grid& g = f.grid();
  if (theta.size() != static_cast<std::size_t>(g.dim()))
    throw ConfigError("shifted_propagator: theta dim mismatch");
  const double dt = t - s;
  const int d = g.dim();
  return detail::apply_symbol(f, [&, dt, d](const auto& xt, const auto& xd) {
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase -= dt * theta[static_cast<std::size_t>(a)] * xd[static_cast<std::size_t>(a)];
    const double damp = std::exp(-lambda * dt * detail::norm2(xt, d));
    return std::polar(damp, phase);
  });
}

}  // namespace fpde
