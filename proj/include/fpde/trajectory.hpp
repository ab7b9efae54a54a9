#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fpde/field.hpp"
#include "fpde/norms.hpp"

namespace fpde {

/// Named diagnostic series sampled at snapshot times; serializes to CSV with
/// a fixed %.17g format so identical runs produce identical bytes.
struct DiagnosticsTable {
  std::vector<std::string> columns;
  std::vector<std::pair<double, std::vector<double>>> rows;

  void add_row(double t, std::vector<double> vals) {
    rows.emplace_back(t, std::move(vals));
  }

  std::string to_csv() const {
    std::string out = "time";
    for (const auto& c : columns) out += "," + c;
    out += "\n";
    char buf[40];
    for (const auto& [t, vals] : rows) {
      std::snprintf(buf, sizeof(buf), "%.17g", t);
      out += buf;
      for (double v : vals) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        out += buf;
      }
      out += "\n";
    }
    return out;
  }

  double series_max(const std::string& name) const {
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t j = column_index(name);
    for (const auto& [t, vals] : rows) best = std::max(best, vals[j]);
    return best;
  }

  std::vector<double> series(const std::string& name) const {
    std::vector<double> out;
    const std::size_t j = column_index(name);
    out.reserve(rows.size());
    for (const auto& [t, vals] : rows) out.push_back(vals[j]);
    return out;
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == name) return j;
    throw ConfigError("diagnostics: unknown column " + name);
  }
};

/// Time-indexed sequence of m-component states at full step resolution, plus
/// the diagnostic series sampled every snapshot_stride steps.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(const Grid& g, int m) : grid_(g), m_(m) {}

  static Trajectory zero(const Grid& g, int m, const std::vector<double>& times) {
    Trajectory tr(g, m);
    std::vector<ScalarField> zeros(static_cast<std::size_t>(m), ScalarField(g));
    for (double t : times) tr.append(t, zeros);
    return tr;
  }

  const Grid& grid() const { return grid_; }
  int components() const { return m_; }
  std::size_t steps() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  double t_end() const { return times_.empty() ? 0.0 : times_.back(); }

  void append(double t, std::vector<ScalarField> state) {
    if (static_cast<int>(state.size()) != m_) throw ConfigError("trajectory: component count mismatch");
    times_.push_back(t);
    states_.push_back(std::move(state));
  }

  const std::vector<ScalarField>& state(std::size_t i) const { return states_[i]; }
  const ScalarField& field(std::size_t i, int comp = 0) const {
    return states_[i][static_cast<std::size_t>(comp)];
  }

  std::size_t index_of(double t) const {
    for (std::size_t i = 0; i < times_.size(); ++i)
      if (std::abs(times_[i] - t) <= 1e-10 * std::max(1.0, std::abs(t))) return i;
    throw ConfigError("trajectory: no stored state at requested time");
  }

  int snapshot_stride = 1;
  DiagnosticsTable diag;
  std::map<std::string, double> meta;  // scalar run facts (bounds, logged means, flags)

  /// sup over shared times of the max-component sup distance.
  static double sup_distance(const Trajectory& a, const Trajectory& b) {
    if (a.steps() != b.steps() || a.components() != b.components())
      throw ConfigError("trajectory: sup_distance shape mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.steps(); ++i)
      for (int c = 0; c < a.components(); ++c)
        best = std::max(best, sup_norm(a.field(i, c) - b.field(i, c)));
    return best;
  }

 private:
  Grid grid_;
  int m_ = 1;
  std::vector<double> times_;
  std::vector<std::vector<ScalarField>> states_;
};

/// Path-space aggregates over a trajectory (trapezoid in time): the L^p-in-time
/// Sobolev norm and the parabolic norm built from it.
inline double y_norm(const Trajectory& tr, int k, double p) {
  if (tr.steps() < 2) return 0.0;
  double acc = 0.0;
  std::vector<double> vals(tr.steps());
  for (std::size_t i = 0; i < tr.steps(); ++i) {
    double s = 0.0;
    for (int c = 0; c < tr.components(); ++c)
      s += sobolev_norm(tr.field(i, c), static_cast<double>(k), p);
    vals[i] = std::pow(s, p);
  }
  for (std::size_t i = 0; i + 1 < tr.steps(); ++i)
    acc += 0.5 * (vals[i] + vals[i + 1]) * (tr.time(i + 1) - tr.time(i));
  return std::pow(acc, 1.0 / p);
}

inline double x_norm(const Trajectory& tr, int k, double p) {
  double sup_part = 0.0;
  for (std::size_t i = 0; i < tr.steps(); ++i) {
    double s = 0.0;
    for (int c = 0; c < tr.components(); ++c)
      s += sobolev_norm(tr.field(i, c), static_cast<double>(k - 1), p);
    sup_part = std::max(sup_part, s);
  }
  // d_t u by centered differences on the stored grid.
  double dtacc = 0.0;
  if (tr.steps() >= 3) {
    std::vector<double> vals;
    std::vector<double> ts;
    for (std::size_t i = 1; i + 1 < tr.steps(); ++i) {
      const double span = tr.time(i + 1) - tr.time(i - 1);
      double s = 0.0;
      for (int c = 0; c < tr.components(); ++c)
        s += sobolev_norm((1.0 / span) * (tr.field(i + 1, c) - tr.field(i - 1, c)),
                          static_cast<double>(k - 1), p);
      vals.push_back(std::pow(s, p));
      ts.push_back(tr.time(i));
    }
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
      dtacc += 0.5 * (vals[i] + vals[i + 1]) * (ts[i + 1] - ts[i]);
  }
  return sup_part + y_norm(tr, k, p) + std::pow(dtacc, 1.0 / p);
}

}  // namespace fpde
