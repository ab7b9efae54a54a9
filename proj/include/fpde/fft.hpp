#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "fpde/errors.hpp"
#include "fpde/grid.hpp"

namespace fpde::detail {

// One cached FFTW plan per (dims, sign). Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so fftw_execute_dft can run on any buffer;
// new-array execution is thread-safe, only planning is serialized.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans p;
    return p;
  }

  void execute(const Grid& g, int sign, std::complex<double>* in, std::complex<double>* out) {
    fftw_plan plan = get_plan(g, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }
  FftPlans(const FftPlans&) = delete;

  fftw_plan get_plan(const Grid& g, int sign) {
    std::scoped_lock lock(mutex_);
    Key key{g.dim(), g.n(), sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch_in(g.total_points());
    std::vector<std::complex<double>> scratch_out(g.total_points());
    std::vector<int> dims(static_cast<std::size_t>(g.dim()), g.n());
    fftw_plan plan = fftw_plan_dft(g.dim(), dims.data(),
                                   reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                   reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  using Key = std::tuple<int, int, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

/// Forward DFT of real samples, normalized so that f(x) = sum_k c_k e^{i xi_k x}.
inline std::vector<std::complex<double>> fft_forward(const Grid& g, std::span<const double> values) {
  const std::size_t npts = g.total_points();
  if (values.size() != npts) throw ConfigError("transform: value array does not match grid");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("transform: non-finite input value");
  std::vector<std::complex<double>> in(npts), out(npts);
  for (std::size_t i = 0; i < npts; ++i) in[i] = values[i];
  FftPlans::instance().execute(g, FFTW_FORWARD, in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(npts);
  for (auto& c : out) c *= scale;
  return out;
}

/// Inverse DFT; returns the real part (inputs are conjugate-symmetric by construction).
inline std::vector<double> fft_inverse(const Grid& g, std::span<const std::complex<double>> coeffs) {
  const std::size_t npts = g.total_points();
  if (coeffs.size() != npts) throw ConfigError("transform: coefficient array does not match grid");
  std::vector<std::complex<double>> in(coeffs.begin(), coeffs.end()), out(npts);
  FftPlans::instance().execute(g, FFTW_BACKWARD, in.data(), out.data());
  std::vector<double> values(npts);
  for (std::size_t i = 0; i < npts; ++i) values[i] = out[i].real();
  return values;
}

}  // namespace fpde::detail
