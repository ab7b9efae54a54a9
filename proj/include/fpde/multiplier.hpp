#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "fpde/calculus.hpp"
#include "fpde/field.hpp"

namespace fpde {

/// A Fourier-multiplier operator, possibly matrix-valued: out_components x
/// in_components symbol entries tabulated over the whole wavenumber lattice.
/// Construction validates finiteness and the conjugate symmetry
/// symbol(-xi) = conj(symbol(xi)) entrywise, so real fields map to real fields;
/// a bad symbol can never surface at application time.
class MultiplierOp {
 public:
  /// fn(out_i, in_j, xi_true, xi_deriv) -> complex entry. The value at xi = 0 is
  /// overridden by zero_mode (the declared zero-mode rule, same for all entries).
  template <typename Fn>
  MultiplierOp(const Grid& g, std::string name, int out_components, int in_components, Fn&& fn,
               std::complex<double> zero_mode = {0.0, 0.0})
      : grid_(g), name_(std::move(name)), out_(out_components), in_(in_components) {
    if (out_ < 1 || in_ < 1) throw ConfigError("multiplier " + name_ + ": bad shape");
    const std::size_t npts = g.total_points();
    entries_.resize(static_cast<std::size_t>(out_ * in_));
    std::array<double, 3> xt, xd;
    for (int i = 0; i < out_; ++i) {
      for (int j = 0; j < in_; ++j) {
        auto& sym = entries_[static_cast<std::size_t>(i * in_ + j)];
        sym.resize(npts);
        for (std::size_t m = 0; m < npts; ++m) {
          g.mode(m, xt, xd);
          std::complex<double> v = (m == 0) ? zero_mode : fn(i, j, xt, xd);
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ConfigError("multiplier " + name_ + ": symbol undefined at a lattice point");
          sym[m] = v;
        }
      }
    }
    validate_symmetry();
    zero_mode_ = zero_mode;
  }

  const Grid& grid() const { return grid_; }
  const std::string& name() const { return name_; }
  int in_components() const { return in_; }
  int out_components() const { return out_; }
  std::complex<double> zero_mode_rule() const { return zero_mode_; }

  const std::vector<std::complex<double>>& entry(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * in_ + j)];
  }

  ScalarField apply(const ScalarField& f) const {
    if (in_ != 1 || out_ != 1) throw ConfigError("multiplier " + name_ + ": not scalar-to-scalar");
    return apply_rows(std::vector<const ScalarField*>{&f}).front();
  }

  VectorField apply_to_scalar(const ScalarField& f) const {
    if (in_ != 1) throw ConfigError("multiplier " + name_ + ": expects vector input");
    return VectorField(apply_rows(std::vector<const ScalarField*>{&f}));
  }

  std::vector<ScalarField> apply(const VectorField& v) const {
    if (v.components() != in_)
      throw ConfigError("multiplier " + name_ + ": input component count mismatch");
    std::vector<const ScalarField*> in;
    in.reserve(static_cast<std::size_t>(in_));
    for (int j = 0; j < in_; ++j) in.push_back(&v.comp(j));
    return apply_rows(in);
  }

  ScalarField apply_to_vector(const VectorField& v) const {
    if (out_ != 1) throw ConfigError("multiplier " + name_ + ": output is not scalar");
    return apply(v).front();
  }

 private:
  std::vector<ScalarField> apply_rows(const std::vector<const ScalarField*>& in) const {
    for (const ScalarField* f : in)
      if (f->grid() != grid_) throw ConfigError("multiplier " + name_ + ": grid mismatch");
    const std::size_t npts = grid_.total_points();
    std::vector<ScalarField> out;
    out.reserve(static_cast<std::size_t>(out_));
    for (int i = 0; i < out_; ++i) {
      std::vector<std::complex<double>> acc(npts, {0.0, 0.0});
      for (int j = 0; j < in_; ++j) {
        const auto& sym = entry(i, j);
        const auto& c = in[static_cast<std::size_t>(j)]->spectral();
        for (std::size_t m = 0; m < npts; ++m) acc[m] += sym[m] * c[m];
      }
      out.push_back(ScalarField::from_spectral(grid_, acc));
    }
    return out;
  }

  void validate_symmetry() const {
    const std::size_t npts = grid_.total_points();
    for (const auto& sym : entries_) {
      double scale = 0.0;
      for (const auto& v : sym) scale = std::max(scale, std::abs(v));
      const double tol = 1e-12 * (scale + 1.0);
      for (std::size_t m = 0; m < npts; ++m) {
        const std::size_t mn = grid_.negate_mode(m);
        if (std::abs(sym[mn] - std::conj(sym[m])) > tol)
          throw ConfigError("multiplier " + name_ +
                            ": symbol is not conjugate-symmetric (real fields would map to complex)");
      }
    }
  }

  Grid grid_;
  std::string name_;
  int out_ = 1;
  int in_ = 1;
  std::vector<std::vector<std::complex<double>>> entries_;
  std::complex<double> zero_mode_ = {0.0, 0.0};
};

/// (-Delta)^{alpha/2}, alpha in (0,2); symbol |xi|^alpha, zero mode 0.
inline MultiplierOp fractional_laplacian(const Grid& g, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw ConfigError("fractional_laplacian: alpha must lie in (0,2)");
  const int d = g.dim();
  return MultiplierOp(g, "fractional_laplacian", 1, 1,
                      [alpha, d](int, int, const auto& xt, const auto&) {
                        return std::complex<double>(std::pow(detail::norm2(xt, d), alpha), 0.0);
                      });
}

/// Riesz transform R_j = (-Delta)^{-1/2} d_j; symbol i xi_j / |xi|, zero mode 0.
inline MultiplierOp riesz(const Grid& g, int axis) {
  if (axis < 0 || axis >= g.dim()) throw ConfigError("riesz: axis out of range");
  const int d = g.dim();
  return MultiplierOp(g, "riesz_" + std::to_string(axis + 1), 1, 1,
                      [axis, d](int, int, const auto& xt, const auto& xd) {
                        const double r = detail::norm2(xt, d);
                        return std::complex<double>(0.0, xd[static_cast<std::size_t>(axis)] / r);
                      });
}

/// R^alpha = (-Delta)^{(alpha-2)/2} div, a row operator taking vector fields to
/// scalars; row entries i xi_j |xi|^{alpha-2}. For alpha = 1 this is the
/// operator pairing with the gradient: R^1 . grad u = -(-Delta)^{1/2} u.
inline MultiplierOp r_alpha(const Grid& g, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) throw ConfigError("r_alpha: alpha must lie in (0,2)");
  const int d = g.dim();
  return MultiplierOp(g, "r_alpha", 1, d,
                      [alpha, d](int, int j, const auto& xt, const auto& xd) {
                        const double r = detail::norm2(xt, d);
                        return std::complex<double>(
                            0.0, xd[static_cast<std::size_t>(j)] * std::pow(r, alpha - 2.0));
                      });
}

/// SQG velocity R = grad^perp (-Delta)^{-1/2}; column (-i xi_2/|xi|, i xi_1/|xi|).
inline MultiplierOp sqg_velocity(const Grid& g) {
  if (g.dim() != 2) throw ConfigError("sqg_velocity: requires a 2D grid");
  return MultiplierOp(g, "sqg_velocity", 2, 1,
                      [](int i, int, const auto& xt, const auto& xd) {
                        const double r = detail::norm2(xt, 2);
                        return i == 0 ? std::complex<double>(0.0, -xd[1] / r)
                                      : std::complex<double>(0.0, xd[0] / r);
                      });
}

}  // namespace fpde
