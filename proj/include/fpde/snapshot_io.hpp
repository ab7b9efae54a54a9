#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fpde/field.hpp"

namespace fpde {

// Binary field snapshot: magic "FPDE", version u16, dim u16, n u32 per axis,
// period f64, then values row-major as f64. All integers and doubles are
// little-endian.

namespace detail {

inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& s, double x) {
  const std::uint64_t v = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  ByteReader(const std::string& data) : data_(data) {}
  std::uint16_t u16() { return static_cast<std::uint16_t>(byte() | (byte() << 8)); }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  double f64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::string raw(std::size_t n) {
    if (pos_ + n > data_.size()) throw ConfigError("snapshot: truncated file");
    std::string out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  unsigned byte() {
    if (pos_ >= data_.size()) throw ConfigError("snapshot: truncated file");
    return static_cast<unsigned char>(data_[pos_++]);
  }
  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_snapshot(const ScalarField& f) {
  const Grid& g = f.grid();
  std::string out = "FPDE";
  detail::put_u16(out, 1);
  detail::put_u16(out, static_cast<std::uint16_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) detail::put_u32(out, static_cast<std::uint32_t>(g.n()));
  detail::put_f64(out, g.period());
  for (double v : f.values()) detail::put_f64(out, v);
  return out;
}

inline ScalarField decode_snapshot(const std::string& data) {
  detail::ByteReader r(data);
  if (r.raw(4) != "FPDE") throw ConfigError("snapshot: bad magic bytes");
  const std::uint16_t version = r.u16();
  if (version != 1) throw ConfigError("snapshot: unsupported version " + std::to_string(version));
  const int dim = r.u16();
  if (dim < 1 || dim > 3) throw ConfigError("snapshot: bad dim");
  std::uint32_t n0 = 0;
  for (int a = 0; a < dim; ++a) {
    const std::uint32_t n = r.u32();
    if (a == 0)
      n0 = n;
    else if (n != n0)
      throw ConfigError("snapshot: anisotropic grids are not supported");
  }
  const double period = r.f64();
  Grid g(dim, static_cast<int>(n0), period);
  std::vector<double> values(g.total_points());
  for (auto& v : values) v = r.f64();
  if (!r.at_end()) throw ConfigError("snapshot: trailing bytes");
  return {g, std::move(values)};
}

inline void write_snapshot(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("snapshot: cannot open " + path + " for writing");
  const std::string data = encode_snapshot(f);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw ConfigError("snapshot: write failed for " + path);
}

inline ScalarField read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("snapshot: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(data);
}

/// CSV export: one row per grid point, coordinates then value.
inline std::string field_to_csv(const ScalarField& f) {
  const Grid& g = f.grid();
  std::string out;
  for (int a = 0; a < g.dim(); ++a) out += "x" + std::to_string(a) + ",";
  out += "value\n";
  char buf[40];
  std::array<double, 3> x;
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords(i, x);
    for (int a = 0; a < g.dim(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g,", x[static_cast<std::size_t>(a)]);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", f[i]);
    out += buf;
  }
  return out;
}

/// 8-bit grayscale heatmap (binary PGM), min/max normalized; returns the
/// normalization so the caller can record it in the run manifest. 2D fields
/// map directly; 1D fields become a height-1 image; 3D fields write the
/// middle slice of the last axis.
struct HeatmapInfo {
  double lo = 0.0;
  double hi = 0.0;
};

inline HeatmapInfo write_heatmap(const std::string& path, const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  int width = n, height = 1;
  std::vector<std::size_t> index;
  std::array<int, 3> idx{0, 0, 0};
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) index.push_back(static_cast<std::size_t>(i));
  } else {
    height = n;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        idx = {r, c, g.dim() == 3 ? n / 2 : 0};
        index.push_back(g.encode(idx));
      }
  }
  HeatmapInfo info;
  info.lo = std::numeric_limits<double>::infinity();
  info.hi = -info.lo;
  for (std::size_t i : index) {
    info.lo = std::min(info.lo, f[i]);
    info.hi = std::max(info.hi, f[i]);
  }
  const double span = info.hi - info.lo;
  std::string data = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (std::size_t i : index) {
    const double t = span > 0.0 ? (f[i] - info.lo) / span : 0.0;
    data.push_back(static_cast<char>(static_cast<int>(std::lround(t * 255.0))));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("heatmap: cannot open " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  return info;
}

}  // namespace fpde
