#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "fpde/field.hpp"

namespace fpde {

/// Deterministic random band-limited field: independent Gaussian coefficients
/// with a smooth 1/(1+|k|^2) falloff on the modes 0 < |k|_inf <= kmax,
/// conjugate-symmetrized, then rescaled to the requested sup norm.
inline ScalarField band_limited_field(const Grid& g, std::uint64_t seed, int kmax, double sup = 1.0,
                                      bool include_mean = false) {
  if (kmax < 1 || kmax > g.n() / 2 - 1) throw ConfigError("band_limited_field: kmax out of range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::complex<double>> c(g.total_points(), {0.0, 0.0});
  std::array<int, 3> idx;
  for (std::size_t m = 0; m < c.size(); ++m) {
    g.decode(m, idx);
    bool in_band = true;
    int k2 = 0;
    bool zero = true;
    for (int a = 0; a < g.dim(); ++a) {
      const int k = g.freq(idx[static_cast<std::size_t>(a)]);
      if (std::abs(k) > kmax) in_band = false;
      if (k != 0) zero = false;
      k2 += k * k;
    }
    if (!in_band || zero) continue;
    const double amp = 1.0 / (1.0 + static_cast<double>(k2));
    c[m] = {amp * normal(rng), amp * normal(rng)};
  }
  // Symmetrize: keep the half with the lexicographically smaller index.
  for (std::size_t m = 0; m < c.size(); ++m) {
    const std::size_t mn = g.negate_mode(m);
    if (mn < m) c[m] = std::conj(c[mn]);
    if (mn == m) c[m] = {c[m].real(), 0.0};
  }
  if (include_mean) c[0] = {normal(rng), 0.0};

  ScalarField f = ScalarField::from_spectral(g, c);
  double s = 0.0;
  for (double v : f.values()) s = std::max(s, std::abs(v));
  if (s == 0.0) return f;
  return (sup / s) * f;
}

}  // namespace fpde
