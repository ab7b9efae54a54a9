#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "fpde/fft.hpp"
#include "fpde/grid.hpp"

namespace fpde {

namespace detail {

// Copyable holder for the lazily computed spectrum. The shared_ptr is set at
// most once per holder; copies share the computed spectrum.
class SpectralCache {
 public:
  SpectralCache() = default;
  SpectralCache(const SpectralCache& o) {
    std::scoped_lock lock(o.mutex_);
    coeffs_ = o.coeffs_;
  }
  SpectralCache& operator=(const SpectralCache& o) {
    if (this != &o) {
      std::shared_ptr<const std::vector<std::complex<double>>> tmp;
      {
        std::scoped_lock lock(o.mutex_);
        tmp = o.coeffs_;
      }
      std::scoped_lock lock(mutex_);
      coeffs_ = std::move(tmp);
    }
    return *this;
  }
  SpectralCache(SpectralCache&& o) noexcept {
    std::scoped_lock lock(o.mutex_);
    coeffs_ = std::move(o.coeffs_);
  }
  SpectralCache& operator=(SpectralCache&& o) noexcept {
    if (this != &o) {
      std::scoped_lock lock(mutex_, o.mutex_);
      coeffs_ = std::move(o.coeffs_);
    }
    return *this;
  }

  const std::vector<std::complex<double>>& get_or_compute(
      const std::function<std::vector<std::complex<double>>()>& compute) const {
    std::scoped_lock lock(mutex_);
    if (!coeffs_) coeffs_ = std::make_shared<const std::vector<std::complex<double>>>(compute());
    return *coeffs_;
  }

  void set(std::vector<std::complex<double>> c) {
    std::scoped_lock lock(mutex_);
    coeffs_ = std::make_shared<const std::vector<std::complex<double>>>(std::move(c));
  }

 private:
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const std::vector<std::complex<double>>> coeffs_;
};

}  // namespace detail

/// Real samples on a Grid, row-major by axis order, with a lazily cached
/// spectral representation. Immutable after construction; all operations
/// return new fields.
class ScalarField {
 public:
  ScalarField() = default;

  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid_(g), values_(g.total_points(), fill) {}

  ScalarField(const Grid& g, std::vector<double> v) : grid_(g), values_(std::move(v)) {
    if (values_.size() != g.total_points())
      throw ConfigError("field: value array does not match grid");
  }

  static ScalarField from_spectral(const Grid& g, std::span<const std::complex<double>> coeffs) {
    ScalarField f(g, detail::fft_inverse(g, coeffs));
    f.cache_.set(std::vector<std::complex<double>>(coeffs.begin(), coeffs.end()));
    return f;
  }

  template <typename Fn>
  static ScalarField sample(const Grid& g, Fn&& fn) {
    std::vector<double> v(g.total_points());
    std::array<double, 3> x;
    for (std::size_t i = 0; i < v.size(); ++i) {
      g.coords(i, x);
      v[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim())));
    }
    return ScalarField(g, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  const std::vector<std::complex<double>>& spectral() const {
    return cache_.get_or_compute([this] { return detail::fft_forward(grid_, values_); });
  }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  bool finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  Grid grid_;
  std::vector<double> values_;
  detail::SpectralCache cache_;
};

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ConfigError("field: grid mismatch in +");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return {a.grid(), std::move(v)};
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ConfigError("field: grid mismatch in -");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return {a.grid(), std::move(v)};
}

inline ScalarField operator*(double s, const ScalarField& a) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * a[i];
  return {a.grid(), std::move(v)};
}

inline ScalarField operator+(const ScalarField& a, double c) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + c;
  return {a.grid(), std::move(v)};
}

/// Pointwise (nodal) product; exact at the nodes, aliased in spectral space.
inline ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ConfigError("field: grid mismatch in product");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return {a.grid(), std::move(v)};
}

/// Components on one shared grid; length dim for geometric vectors, or m for
/// the unknowns of a system.
class VectorField {
 public:
  VectorField() = default;

  VectorField(const Grid& g, int m) : comps_(static_cast<std::size_t>(m), ScalarField(g)) {
    if (m < 1) throw ConfigError("vector field: needs at least one component");
  }

  explicit VectorField(std::vector<ScalarField> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw ConfigError("vector field: needs at least one component");
    for (const auto& c : comps_)
      if (c.grid() != comps_.front().grid())
        throw ConfigError("vector field: components on different grids");
  }

  const Grid& grid() const { return comps_.front().grid(); }
  int components() const { return static_cast<int>(comps_.size()); }
  const ScalarField& comp(int i) const { return comps_[static_cast<std::size_t>(i)]; }
  ScalarField& comp(int i) { return comps_[static_cast<std::size_t>(i)]; }
  const std::vector<ScalarField>& comps() const { return comps_; }

  /// Pointwise Euclidean magnitude.
  ScalarField magnitude() const {
    std::vector<double> v(comps_.front().size(), 0.0);
    for (const auto& c : comps_)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[i] * c[i];
    for (double& x : v) x = std::sqrt(x);
    return {grid(), std::move(v)};
  }

  bool finite() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& c) { return c.finite(); });
  }

 private:
  std::vector<ScalarField> comps_;
};

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.components() != b.components()) throw ConfigError("vector field: component mismatch in +");
  std::vector<ScalarField> c;
  c.reserve(static_cast<std::size_t>(a.components()));
  for (int i = 0; i < a.components(); ++i) c.push_back(a.comp(i) + b.comp(i));
  return VectorField(std::move(c));
}

inline VectorField operator-(const VectorField& a, const VectorField& b) {
  if (a.components() != b.components()) throw ConfigError("vector field: component mismatch in -");
  std::vector<ScalarField> c;
  c.reserve(static_cast<std::size_t>(a.components()));
  for (int i = 0; i < a.components(); ++i) c.push_back(a.comp(i) - b.comp(i));
  return VectorField(std::move(c));
}

inline VectorField operator*(double s, const VectorField& a) {
  std::vector<ScalarField> c;
  c.reserve(static_cast<std::size_t>(a.components()));
  for (int i = 0; i < a.components(); ++i) c.push_back(s * a.comp(i));
  return VectorField(std::move(c));
}

}  // namespace fpde
