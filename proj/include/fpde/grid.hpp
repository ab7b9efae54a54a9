#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "fpde/errors.hpp"

namespace fpde {

/// Uniform periodic grid on [0,L)^dim, same power-of-two resolution on every axis.
/// Wavenumbers are the standard symmetric lattice xi_k = 2*pi*k/L with
/// k in {0,..,n/2,-(n/2-1),..,-1} per axis (FFT layout order).
class Grid {
 public:
  Grid() = default;

  Grid(int dim, int n_per_axis, double period)
      : dim_(dim), n_(n_per_axis), period_(period) {
    if (dim < 1 || dim > 3) throw ConfigError("grid: dim must be 1, 2 or 3");
    if (n_per_axis < 8 || (n_per_axis & (n_per_axis - 1)) != 0)
      throw ConfigError("grid: n_per_axis must be a power of two >= 8");
    if (!(period > 0.0) || !std::isfinite(period))
      throw ConfigError("grid: period must be a positive finite real");
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  double period() const { return period_; }
  double spacing() const { return period_ / n_; }

  std::size_t total_points() const {
    std::size_t t = 1;
    for (int a = 0; a < dim_; ++a) t *= static_cast<std::size_t>(n_);
    return t;
  }

  /// h^dim, the quadrature weight of one grid cell.
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing();
    return v;
  }

  /// Integer frequency of layout index m in [0,n): 0..n/2 then negatives.
  int freq(int m) const { return m <= n_ / 2 ? m : m - n_; }

  double xi_of_freq(int k) const { return 2.0 * std::numbers::pi * k / period_; }

  /// True wavenumber of layout index m (Nyquist kept, as +n/2).
  double xi(int m) const { return xi_of_freq(freq(m)); }

  /// Wavenumber used by odd (derivative-like) symbols: zero at the Nyquist
  /// index so real fields map to real fields.
  double xi_deriv(int m) const { return m == n_ / 2 ? 0.0 : xi(m); }

  /// Largest |xi| on the lattice (the corner mode).
  double xi_max() const {
    double ax = xi_of_freq(n_ / 2);
    return ax * std::sqrt(static_cast<double>(dim_));
  }

  void decode(std::size_t flat, std::array<int, 3>& idx) const {
    idx = {0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
  }

  std::size_t encode(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a)
      flat = flat * static_cast<std::size_t>(n_) +
             static_cast<std::size_t>(((idx[static_cast<std::size_t>(a)] % n_) + n_) % n_);
    return flat;
  }

  void coords(std::size_t flat, std::array<double, 3>& x) const {
    std::array<int, 3> idx;
    decode(flat, idx);
    x = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)] * spacing();
  }

  /// Per-axis wavenumbers of a spectral layout index: truth and derivative variants.
  void mode(std::size_t flat, std::array<double, 3>& xi_true, std::array<double, 3>& xi_d) const {
    std::array<int, 3> idx;
    decode(flat, idx);
    xi_true = {0.0, 0.0, 0.0};
    xi_d = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
      xi_true[static_cast<std::size_t>(a)] = xi(idx[static_cast<std::size_t>(a)]);
      xi_d[static_cast<std::size_t>(a)] = xi_deriv(idx[static_cast<std::size_t>(a)]);
    }
  }

  /// Layout index of the negated mode (-k mod n per axis).
  std::size_t negate_mode(std::size_t flat) const {
    std::array<int, 3> idx;
    decode(flat, idx);
    for (int a = 0; a < dim_; ++a) {
      int& i = idx[static_cast<std::size_t>(a)];
      i = (n_ - i) % n_;
    }
    return encode(idx);
  }

  /// Torus distance between two points given their flat indices.
  double torus_distance(std::size_t i, std::size_t j) const {
    std::array<int, 3> a, b;
    decode(i, a);
    decode(j, b);
    double s = 0.0;
    for (int ax = 0; ax < dim_; ++ax) {
      int d = std::abs(a[static_cast<std::size_t>(ax)] - b[static_cast<std::size_t>(ax)]);
      d = std::min(d, n_ - d);
      double dd = d * spacing();
      s += dd * dd;
    }
    return std::sqrt(s);
  }

  friend bool operator==(const Grid& l, const Grid& r) {
    return l.dim_ == r.dim_ && l.n_ == r.n_ && l.period_ == r.period_;
  }
  friend bool operator!=(const Grid& l, const Grid& r) { return !(l == r); }

 private:
  int dim_ = 1;
  int n_ = 8;
  double period_ = 1.0;
};

}  // namespace fpde
