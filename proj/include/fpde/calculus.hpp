#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "fpde/field.hpp"

namespace fpde {

namespace detail {

/// Apply a diagonal spectral symbol given as fn(xi_true, xi_deriv) -> complex.
template <typename Fn>
ScalarField apply_symbol(const ScalarField& f, Fn&& fn) {
  const Grid& g = f.grid();
  const auto& c = f.spectral();
  std::vector<std::complex<double>> out(c.size());
  std::array<double, 3> xt, xd;
  for (std::size_t m = 0; m < c.size(); ++m) {
    g.mode(m, xt, xd);
    out[m] = fn(xt, xd) * c[m];
  }
  return ScalarField::from_spectral(g, out);
}

inline double norm2(const std::array<double, 3>& x, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
  return std::sqrt(s);
}

}  // namespace detail

/// Spectral partial derivative along one axis (Nyquist mode carries none).
inline ScalarField partial(const ScalarField& f, int axis) {
  const int d = f.grid().dim();
  if (axis < 0 || axis >= d) throw ConfigError("partial: axis out of range");
  return detail::apply_symbol(f, [axis](const auto&, const auto& xd) {
    return std::complex<double>(0.0, xd[static_cast<std::size_t>(axis)]);
  });
}

inline VectorField gradient(const ScalarField& f) {
  std::vector<ScalarField> comps;
  comps.reserve(static_cast<std::size_t>(f.grid().dim()));
  for (int a = 0; a < f.grid().dim(); ++a) comps.push_back(partial(f, a));
  return VectorField(std::move(comps));
}

inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  if (v.components() != g.dim()) throw ConfigError("divergence: component count != grid dim");
  std::vector<std::complex<double>> acc(g.total_points(), {0.0, 0.0});
  std::array<double, 3> xt, xd;
  for (int a = 0; a < g.dim(); ++a) {
    const auto& c = v.comp(a).spectral();
    for (std::size_t m = 0; m < acc.size(); ++m) {
      g.mode(m, xt, xd);
      acc[m] += std::complex<double>(0.0, xd[static_cast<std::size_t>(a)]) * c[m];
    }
  }
  return ScalarField::from_spectral(g, acc);
}

/// div grad - grad div, assembled mode-by-mode so the 1D symbol is exactly zero
/// and div(box v) vanishes identically.
inline VectorField box_op(const VectorField& v) {
  const Grid& g = v.grid();
  const int d = g.dim();
  if (v.components() != d) throw ConfigError("box_op: component count != grid dim");
  const std::size_t npts = g.total_points();
  std::vector<const std::vector<std::complex<double>>*> spec(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) spec[static_cast<std::size_t>(a)] = &v.comp(a).spectral();

  std::vector<std::vector<std::complex<double>>> out(
      static_cast<std::size_t>(d), std::vector<std::complex<double>>(npts));
  std::array<double, 3> xt, xd;
  for (std::size_t m = 0; m < npts; ++m) {
    g.mode(m, xt, xd);
    double k2 = 0.0;
    std::complex<double> kdotv{0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      const double ka = xd[static_cast<std::size_t>(a)];
      k2 += ka * ka;
      kdotv += ka * (*spec[static_cast<std::size_t>(a)])[m];
    }
    for (int a = 0; a < d; ++a) {
      const double ka = xd[static_cast<std::size_t>(a)];
      out[static_cast<std::size_t>(a)][m] = -k2 * (*spec[static_cast<std::size_t>(a)])[m] + ka * kdotv;
    }
  }
  std::vector<ScalarField> comps;
  comps.reserve(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) comps.push_back(ScalarField::from_spectral(g, out[static_cast<std::size_t>(a)]));
  return VectorField(std::move(comps));
}

/// Two-thirds rule: zero every mode with |k| > n/3 on any axis.
inline ScalarField dealias(const ScalarField& f) {
  const Grid& g = f.grid();
  const int kcut = g.n() / 3;
  const auto& c = f.spectral();
  std::vector<std::complex<double>> out(c);
  std::array<int, 3> idx;
  for (std::size_t m = 0; m < out.size(); ++m) {
    g.decode(m, idx);
    for (int a = 0; a < g.dim(); ++a) {
      if (std::abs(g.freq(idx[static_cast<std::size_t>(a)])) > kcut) {
        out[m] = {0.0, 0.0};
        break;
      }
    }
  }
  return ScalarField::from_spectral(g, out);
}

/// Dealiased pointwise product, the form every solver feeds to spectral operators.
inline ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  return dealias(pointwise(a, b));
}

/// (-Delta)^{alpha/2} via |xi|^alpha; the zero mode is annihilated for all alpha.
inline ScalarField fractional_laplacian_apply(const ScalarField& f, double alpha) {
  const int d = f.grid().dim();
  return detail::apply_symbol(f, [alpha, d](const auto& xt, const auto&) {
    const double r = detail::norm2(xt, d);
    return std::complex<double>(r > 0.0 ? std::pow(r, alpha) : 0.0, 0.0);
  });
}

inline ScalarField half_laplacian(const ScalarField& f) { return fractional_laplacian_apply(f, 1.0); }

/// Exact translation f(. - shift) for band-limited fields (phase uses the
/// derivative wavenumbers so the result stays real).
inline ScalarField translate(const ScalarField& f, std::span<const double> shift) {
  const Grid& g = f.grid();
  if (shift.size() != static_cast<std::size_t>(g.dim())) throw ConfigError("translate: shift dim mismatch");
  return detail::apply_symbol(f, [&](const auto&, const auto& xd) {
    double phase = 0.0;
    for (int a = 0; a < g.dim(); ++a) phase -= xd[static_cast<std::size_t>(a)] * shift[static_cast<std::size_t>(a)];
    return std::exp(std::complex<double>(0.0, phase));
  });
}

/// Carre du champ E(f,g) = g*Lf + f*Lg - L(fg) with L = (-Delta)^{1/2} and the
/// product fg dealiased. Symmetric; nonnegative on the diagonal up to the
/// spectral tail of fg.
inline ScalarField carre_du_champ(const ScalarField& f, const ScalarField& g) {
  if (f.grid() != g.grid()) throw ConfigError("carre_du_champ: grid mismatch");
  ScalarField lf = half_laplacian(f);
  ScalarField lg = half_laplacian(g);
  ScalarField lfg = half_laplacian(dealiased_product(f, g));
  return pointwise(g, lf) + pointwise(f, lg) - lfg;
}

}  // namespace fpde
