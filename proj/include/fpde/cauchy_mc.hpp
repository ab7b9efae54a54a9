#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fpde/field.hpp"

namespace fpde {

/// Sampler for increments of an isotropic d-dimensional Cauchy process.
/// An increment over time step s is s * scale * Z/|N| with Z a standard
/// d-dimensional normal and N an independent standard scalar normal
/// (multivariate Student-t, one degree of freedom), which has density
/// c_d s / (|y|^2 + s^2)^{(d+1)/2} at unit scale. Deterministic per seed.
class CauchySampler {
 public:
  CauchySampler(std::uint64_t rng_seed, int dim, double scale = 1.0)
      : seed_(rng_seed), dim_(dim), scale_(scale) {
    if (dim < 1 || dim > 3) throw ConfigError("cauchy sampler: dim must be 1..3");
    if (!(scale >= 0.0)) throw ConfigError("cauchy sampler: scale must be >= 0");
  }

  std::uint64_t seed() const { return seed_; }
  int dim() const { return dim_; }
  double scale() const { return scale_; }

  /// n increments over time step t, in a fixed deterministic order.
  std::vector<std::array<double, 3>> increments(double t, std::size_t n) const {
    std::mt19937_64 rng(seed_);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::array<double, 3>> out(n, {0.0, 0.0, 0.0});
    for (auto& y : out) {
      double denom = 0.0;
      while (denom == 0.0) denom = std::abs(normal(rng));
      for (int a = 0; a < dim_; ++a) y[static_cast<std::size_t>(a)] = t * scale_ * normal(rng) / denom;
    }
    return out;
  }

 private:
  std::uint64_t seed_;
  int dim_;
  double scale_;
};

enum class McEvaluation { Trigonometric, NearestNode };

struct McEstimate {
  ScalarField estimate;
  ScalarField standard_error;
};

namespace detail {

// Empirical characteristic sums E e^{i xi . jump} for every lattice frequency
// with |k| <= kmax per axis; index space is [-kmax, kmax]^dim flattened.
inline std::vector<std::complex<double>> characteristic_table(
    const Grid& g, const std::vector<std::array<double, 3>>& jumps, int kmax) {
  const int d = g.dim();
  const int width = 2 * kmax + 1;
  std::size_t tsize = 1;
  for (int a = 0; a < d; ++a) tsize *= static_cast<std::size_t>(width);
  std::vector<std::complex<double>> table(tsize, {0.0, 0.0});
  const double base = 2.0 * std::numbers::pi / g.period();

  std::vector<std::vector<std::complex<double>>> pows(
      static_cast<std::size_t>(d), std::vector<std::complex<double>>(static_cast<std::size_t>(kmax) + 1));
  for (const auto& y : jumps) {
    for (int a = 0; a < d; ++a) {
      auto& p = pows[static_cast<std::size_t>(a)];
      const std::complex<double> w = std::polar(1.0, base * y[static_cast<std::size_t>(a)]);
      p[0] = {1.0, 0.0};
      for (int k = 1; k <= kmax; ++k) p[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k - 1)] * w;
    }
    for (std::size_t idx = 0; idx < tsize; ++idx) {
      std::size_t rest = idx;
      std::complex<double> v{1.0, 0.0};
      for (int a = d - 1; a >= 0; --a) {
        const int k = static_cast<int>(rest % static_cast<std::size_t>(width)) - kmax;
        rest /= static_cast<std::size_t>(width);
        const auto& p = pows[static_cast<std::size_t>(a)];
        v *= (k >= 0) ? p[static_cast<std::size_t>(k)] : std::conj(p[static_cast<std::size_t>(-k)]);
      }
      table[idx] += v;
    }
  }
  return table;
}

inline std::size_t char_index(const Grid& g, const std::array<int, 3>& kvec, int kmax) {
  const int width = 2 * kmax + 1;
  std::size_t idx = 0;
  for (int a = 0; a < g.dim(); ++a)
    idx = idx * static_cast<std::size_t>(width) +
          static_cast<std::size_t>(kvec[static_cast<std::size_t>(a)] + kmax);
  return idx;
}

// Zero-pad the spectrum of f onto a grid with twice the resolution.
inline ScalarField refine_double(const ScalarField& f) {
  const Grid& g = f.grid();
  Grid fine(g.dim(), 2 * g.n(), g.period());
  const auto& c = f.spectral();
  std::vector<std::complex<double>> cf(fine.total_points(), {0.0, 0.0});
  std::array<int, 3> idx, fidx;
  for (std::size_t m = 0; m < c.size(); ++m) {
    g.decode(m, idx);
    fidx = {0, 0, 0};
    bool nyq = false;
    for (int a = 0; a < g.dim(); ++a) {
      const int k = g.freq(idx[static_cast<std::size_t>(a)]);
      if (idx[static_cast<std::size_t>(a)] == g.n() / 2) nyq = true;  // split below
      fidx[static_cast<std::size_t>(a)] = (k + 2 * g.n()) % (2 * g.n());
    }
    if (!nyq) {
      cf[fine.encode(fidx)] += c[m];
    } else {
      // Nyquist energy splits evenly between +n/2 and -n/2 on the fine lattice.
      std::vector<std::array<int, 3>> targets{fidx};
      for (int a = 0; a < g.dim(); ++a) {
        if (idx[static_cast<std::size_t>(a)] != g.n() / 2) continue;
        std::vector<std::array<int, 3>> next;
        for (auto t : targets) {
          auto tp = t;
          tp[static_cast<std::size_t>(a)] = g.n() / 2;
          auto tm = t;
          tm[static_cast<std::size_t>(a)] = 2 * g.n() - g.n() / 2;
          next.push_back(tp);
          next.push_back(tm);
        }
        targets = std::move(next);
      }
      const double w = 1.0 / static_cast<double>(targets.size());
      for (const auto& t : targets) cf[fine.encode(t)] += w * c[m];
    }
  }
  return ScalarField::from_spectral(fine, cf);
}

}  // namespace detail

/// Monte Carlo estimate of the Cauchy semigroup P^lambda_t f together with the
/// pointwise standard error. The estimator is the sample mean of
/// f(x + lambda * Y_i) with Y_i ~ increments(t); off-grid values use exact
/// trigonometric interpolation (default) or nearest-node lookup. The reduction
/// order over samples is fixed, so results are deterministic per seed.
inline McEstimate mc_semigroup(const CauchySampler& sampler, double lambda, double t, const ScalarField& f,
                               std::size_t n_samples, McEvaluation mode = McEvaluation::Trigonometric) {
  if (n_samples < 1000) throw ConfigError("mc_semigroup: n_samples must be >= 1000");
  if (!(lambda >= 0.0)) throw ConfigError("mc_semigroup: lambda must be >= 0");
  const Grid& g = f.grid();
  if (sampler.dim() != g.dim()) throw ConfigError("mc_semigroup: sampler dim mismatch");
  const std::size_t npts = g.total_points();
  const double m_inv = 1.0 / static_cast<double>(n_samples);

  auto jumps = sampler.increments(t, n_samples);
  for (auto& y : jumps)
    for (int a = 0; a < g.dim(); ++a) y[static_cast<std::size_t>(a)] *= lambda;

  if (mode == McEvaluation::NearestNode) {
    // Histogram the wrapped node offsets, then correlate with the samples.
    const double h = g.spacing();
    std::vector<double> counts(npts, 0.0);
    std::array<int, 3> off;
    for (const auto& y : jumps) {
      off = {0, 0, 0};
      for (int a = 0; a < g.dim(); ++a) {
        const long long o = std::llround(y[static_cast<std::size_t>(a)] / h);
        off[static_cast<std::size_t>(a)] = static_cast<int>(((o % g.n()) + g.n()) % g.n());
      }
      counts[g.encode(off)] += 1.0;
    }
    std::vector<double> est(npts, 0.0), second(npts, 0.0);
    std::array<int, 3> xi, sum;
    for (std::size_t o = 0; o < npts; ++o) {
      if (counts[o] == 0.0) continue;
      g.decode(o, off);
      const double w = counts[o] * m_inv;
      for (std::size_t i = 0; i < npts; ++i) {
        g.decode(i, xi);
        for (int a = 0; a < g.dim(); ++a)
          sum[static_cast<std::size_t>(a)] = xi[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
        const double v = f[g.encode(sum)];
        est[i] += w * v;
        second[i] += w * v * v;
      }
    }
    std::vector<double> se(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      const double var = std::max(second[i] - est[i] * est[i], 0.0);
      se[i] = std::sqrt(var / static_cast<double>(n_samples - 1));
    }
    return {ScalarField(g, std::move(est)), ScalarField(g, std::move(se))};
  }

  // Trigonometric path: the sample mean of translates multiplies each Fourier
  // coefficient by the empirical characteristic function of the jumps. The
  // second moment runs the same trick on f^2, represented exactly on a grid of
  // twice the resolution.
  const int kmax = g.n();  // covers the fine lattice of f^2 as well
  auto table = detail::characteristic_table(g, jumps, kmax);

  const auto& c = f.spectral();
  std::vector<std::complex<double>> cm(npts);
  std::array<int, 3> idx, kvec;
  for (std::size_t m = 0; m < npts; ++m) {
    g.decode(m, idx);
    for (int a = 0; a < g.dim(); ++a) kvec[static_cast<std::size_t>(a)] = g.freq(idx[static_cast<std::size_t>(a)]);
    cm[m] = c[m] * table[detail::char_index(g, kvec, kmax)] * m_inv;
  }
  ScalarField estimate = ScalarField::from_spectral(g, cm);

  ScalarField f_fine = detail::refine_double(f);
  ScalarField f2_fine = pointwise(f_fine, f_fine);
  const Grid& gf = f_fine.grid();
  const auto& c2 = f2_fine.spectral();
  std::vector<std::complex<double>> cm2(gf.total_points());
  for (std::size_t m = 0; m < cm2.size(); ++m) {
    gf.decode(m, idx);
    bool in_range = true;
    for (int a = 0; a < gf.dim(); ++a) {
      kvec[static_cast<std::size_t>(a)] = gf.freq(idx[static_cast<std::size_t>(a)]);
      if (std::abs(kvec[static_cast<std::size_t>(a)]) > kmax) in_range = false;
    }
    cm2[m] = in_range ? c2[m] * table[detail::char_index(g, kvec, kmax)] * m_inv : 0.0;
  }
  ScalarField second_fine = ScalarField::from_spectral(gf, cm2);

  std::vector<double> se(npts);
  std::array<int, 3> fine_idx;
  for (std::size_t i = 0; i < npts; ++i) {
    g.decode(i, idx);
    for (int a = 0; a < g.dim(); ++a) fine_idx[static_cast<std::size_t>(a)] = 2 * idx[static_cast<std::size_t>(a)];
    const double m2 = second_fine[gf.encode(fine_idx)];
    const double var = std::max(m2 - estimate[i] * estimate[i], 0.0);
    se[i] = std::sqrt(var / static_cast<double>(n_samples - 1));
  }
  return {std::move(estimate), ScalarField(g, std::move(se))};
}

}  // namespace fpde
