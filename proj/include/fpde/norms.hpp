#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fpde/calculus.hpp"
#include "fpde/field.hpp"

namespace fpde {

/// Grid quadrature L^p norm, (sum |f|^p h^dim)^{1/p}.
inline double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
  const double w = f.grid().cell_volume();
  double s = 0.0;
  if (p == 2.0) {
    for (double v : f.values()) s += v * v;
  } else {
    for (double v : f.values()) s += std::pow(std::abs(v), p);
  }
  return std::pow(s * w, 1.0 / p);
}

inline double sup_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s = std::max(s, std::abs(v));
  return s;
}

/// Signed maximum, the quantity the maximum principle controls.
inline double max_value(const ScalarField& f) {
  double s = -std::numeric_limits<double>::infinity();
  for (double v : f.values()) s = std::max(s, v);
  return s;
}

inline double sup_norm(const VectorField& v) {
  double s = 0.0;
  for (const auto& c : v.comps()) s = std::max(s, sup_norm(c));
  return s;
}

inline double lp_norm(const VectorField& v, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
  return lp_norm(v.magnitude(), p);
}

namespace detail {

// All componentwise derivatives of order k as a flat tensor (with repetitions).
inline std::vector<ScalarField> derivative_tensor(const ScalarField& f, int order) {
  std::vector<ScalarField> cur{f};
  for (int k = 0; k < order; ++k) {
    std::vector<ScalarField> next;
    next.reserve(cur.size() * static_cast<std::size_t>(f.grid().dim()));
    for (const auto& c : cur)
      for (int a = 0; a < f.grid().dim(); ++a) next.push_back(partial(c, a));
    cur = std::move(next);
  }
  return cur;
}

inline ScalarField tensor_magnitude(const std::vector<ScalarField>& comps) {
  std::vector<double> v(comps.front().size(), 0.0);
  for (const auto& c : comps)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[i] * c[i];
  for (double& x : v) x = std::sqrt(x);
  return {comps.front().grid(), std::move(v)};
}

inline bool near_integer(double b) { return std::abs(b - std::round(b)) < 1e-12; }

}  // namespace detail

/// Sobolev norm. Integer beta: sum over k <= beta of the L^p norms of the
/// k-th derivative tensors (spectral derivatives). Fractional beta with p = 2:
/// the equivalent multiplier form ||f||_2 + sum_k ||(-Delta)^{s/2} grad^k f||_2
/// with s the fractional part. Fractional beta with p != 2: the double-sum
/// quadrature of the Gagliardo seminorm over all grid-point pairs with the
/// torus metric; desk-scale only (dim <= 2, n <= 128).
inline double sobolev_norm(const ScalarField& f, double beta, double p) {
  if (!(beta >= 0.0)) throw ConfigError("sobolev_norm: beta must be >= 0");
  if (!(p >= 1.0)) throw ConfigError("sobolev_norm: p must be >= 1");
  const Grid& g = f.grid();
  if (detail::near_integer(beta)) {
    const int kb = static_cast<int>(std::round(beta));
    double s = 0.0;
    for (int k = 0; k <= kb; ++k)
      s += lp_norm(detail::tensor_magnitude(detail::derivative_tensor(f, k)), p);
    return s;
  }
  const int kb = static_cast<int>(std::floor(beta));
  const double frac = beta - kb;
  if (p == 2.0) {
    double s = lp_norm(f, 2.0);
    for (int k = 0; k <= kb; ++k) {
      auto tensor = detail::derivative_tensor(f, k);
      double acc = 0.0;
      for (const auto& c : tensor) {
        const double t = lp_norm(fractional_laplacian_apply(c, frac), 2.0);
        acc += t * t;
      }
      s += std::sqrt(acc);
    }
    return s;
  }
  if (g.dim() > 2 || g.n() > 128)
    throw ConfigError("sobolev_norm: fractional p != 2 quadrature is limited to dim <= 2, n <= 128");
  const std::size_t npts = g.total_points();
  const double w2 = g.cell_volume() * g.cell_volume();
  double s = lp_norm(f, p);
  for (int k = 0; k <= kb; ++k) {
    auto tensor = detail::derivative_tensor(f, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
      for (std::size_t j = 0; j < npts; ++j) {
        if (i == j) continue;
        double diff2 = 0.0;
        for (const auto& c : tensor) {
          const double d = c[i] - c[j];
          diff2 += d * d;
        }
        const double dist = g.torus_distance(i, j);
        acc += std::pow(std::sqrt(diff2), p) / std::pow(dist, g.dim() + frac * p) * w2;
      }
    }
    s += std::pow(acc, 1.0 / p);
  }
  return s;
}

struct HolderValue {
  double value = 0.0;
  bool lower_bound = false;  // true when estimated from a shift subsample
};

/// Holder seminorm sup_y ||f(.+y) - f||_inf / dist(y)^beta over nonzero grid
/// shifts (torus metric). Above 128 points per axis a fixed random subsample
/// of 1e4 shifts is used and the result is marked as a lower bound.
inline HolderValue holder_seminorm_info(const ScalarField& f, double beta) {
  if (!(beta > 0.0) || !(beta <= 1.0)) throw ConfigError("holder_seminorm: beta must lie in (0,1]");
  const Grid& g = f.grid();
  const std::size_t npts = g.total_points();
  const bool subsample = g.n() > 128;

  std::vector<std::size_t> shifts;
  if (!subsample) {
    shifts.reserve(npts - 1);
    for (std::size_t s = 1; s < npts; ++s) shifts.push_back(s);
  } else {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<std::size_t> dist(1, npts - 1);
    shifts.resize(10000);
    for (auto& s : shifts) s = dist(rng);
  }

  std::array<int, 3> off, xi, sum;
  double best = 0.0;
  for (std::size_t s : shifts) {
    g.decode(s, off);
    double m = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
      g.decode(i, xi);
      for (int a = 0; a < g.dim(); ++a)
        sum[static_cast<std::size_t>(a)] = xi[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
      m = std::max(m, std::abs(f[g.encode(sum)] - f[i]));
    }
    best = std::max(best, m / std::pow(g.torus_distance(s, 0), beta));
  }
  return {best, subsample};
}

inline double holder_seminorm(const ScalarField& f, double beta) {
  return holder_seminorm_info(f, beta).value;
}

/// ||f||_{U^{k,p}} = ||f||_inf + sum_j ||d_j f||_{k,p} (componentwise).
inline double ukp_norm(const ScalarField& f, int k, double p) {
  double s = sup_norm(f);
  for (int a = 0; a < f.grid().dim(); ++a)
    s += sobolev_norm(partial(f, a), static_cast<double>(k), p);
  return s;
}

/// Named norms of one field at one instant; serializes to (time, name, value) rows.
struct NormReport {
  std::map<double, double> lp;                        // p -> value
  std::map<std::pair<double, double>, double> sobolev;  // (beta,p) -> value
  std::map<double, HolderValue> holder;               // beta -> value
  double sup = 0.0;
  std::map<std::pair<int, double>, double> u_kp;      // (k,p) -> value

  std::vector<std::pair<std::string, double>> rows() const {
    std::vector<std::pair<std::string, double>> out;
    out.emplace_back("sup", sup);
    for (const auto& [p, v] : lp) out.emplace_back("l" + fmt(p), v);
    for (const auto& [bp, v] : sobolev) out.emplace_back("w" + fmt(bp.first) + "_" + fmt(bp.second), v);
    for (const auto& [b, v] : holder)
      out.emplace_back(std::string("holder") + fmt(b) + (v.lower_bound ? "_lb" : ""), v.value);
    for (const auto& [kp, v] : u_kp)
      out.emplace_back("u" + std::to_string(kp.first) + "_" + fmt(kp.second), v);
    return out;
  }

  static NormReport standard(const ScalarField& f) {
    NormReport r;
    r.sup = sup_norm(f);
    r.lp[2.0] = lp_norm(f, 2.0);
    r.holder[0.5] = holder_seminorm_info(f, 0.5);
    r.sobolev[{1.0, 2.0}] = sobolev_norm(f, 1.0, 2.0);
    r.u_kp[{1, 2.0}] = ukp_norm(f, 1, 2.0);
    return r;
  }

 private:
  static std::string fmt(double x) {
    char buf[32];
    if (std::abs(x - std::round(x)) < 1e-12)
      std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(std::round(x)));
    else
      std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
  }
};

}  // namespace fpde
