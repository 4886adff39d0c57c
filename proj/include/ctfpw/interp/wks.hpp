#pragma once

// Whittaker-Kotelnikov-Shannon truncation benchmark:
//   g_N(t) = sum_{k=-N..N} g(k) sinc(t - k),  sinc(u) = sin(pi u) / (pi u),
// for a band-pass model function g, compared with g on a uniform grid.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ctfpw/core/error.hpp"

namespace ctfpw {

enum class WksModel {
  // Indicator of [-1/2,-1/3] u [1/3,1/2]: the two-band set scaled into the
  // band of unit-spaced sampling.
  BandFitted,
  // Indicator of [-1,-2/3] u [2/3,1] taken at face value. Its support
  // exceeds the sampling band, so the error contains aliasing.
  Literal,
};

inline std::string_view to_string(WksModel m) {
  return m == WksModel::BandFitted ? "band-fitted" : "literal";
}

inline double sinc(double u) {
  if (u == 0.0) return 1.0;
  const double x = std::numbers::pi * u;
  return std::sin(x) / x;
}

/// Inverse Fourier transform of the model's two-band indicator.
inline double wks_model(WksModel m, double t) {
  const double pi = std::numbers::pi;
  const double hi = m == WksModel::BandFitted ? 0.5 : 1.0;
  const double lo = hi * (2.0 / 3.0);
  if (t == 0.0) return 2.0 * (hi - lo);
  return (std::sin(2.0 * pi * hi * t) - std::sin(2.0 * pi * lo * t)) / (pi * t);
}

struct WksDemoResult {
  int n = 0;
  WksModel model = WksModel::BandFitted;
  double max_abs_error = 0.0;
  double argmax_t = 0.0;
  std::vector<double> t;
  std::vector<double> truth;
  std::vector<double> approx;
  std::vector<double> error;

  void write_csv(std::ostream& os) const {
    os << "t,truth,approx,error\n";
    os.precision(17);
    for (std::size_t i = 0; i < t.size(); ++i) {
      os << t[i] << ',' << truth[i] << ',' << approx[i] << ',' << error[i]
         << '\n';
    }
  }
};

/// Grid t_i = -t_max + i * step, i = 0..round(2 t_max / step).
inline std::vector<double> uniform_grid(double t_max, double step) {
  if (!(t_max > 0.0) || !(step > 0.0)) {
    throw DomainError("grid half-width and step must be positive");
  }
  const long count = std::lround(2.0 * t_max / step);
  std::vector<double> out(static_cast<std::size_t>(count) + 1);
  for (long i = 0; i <= count; ++i) out[i] = -t_max + step * i;
  return out;
}

inline WksDemoResult wks_truncation_demo(int n, const std::vector<double>& grid,
                                         WksModel model = WksModel::BandFitted) {
  if (n < 0) throw DomainError("truncation order must be >= 0");
  WksDemoResult r;
  r.n = n;
  r.model = model;
  r.t = grid;
  std::vector<double> samples;
  for (int k = -n; k <= n; ++k) samples.push_back(wks_model(model, k));
  r.truth.reserve(grid.size());
  r.approx.reserve(grid.size());
  r.error.reserve(grid.size());
  for (double t : grid) {
    double acc = 0.0;
    for (int k = -n; k <= n; ++k) acc += samples[k + n] * sinc(t - k);
    const double truth = wks_model(model, t);
    const double err = std::abs(truth - acc);
    r.truth.push_back(truth);
    r.approx.push_back(acc);
    r.error.push_back(err);
    if (err > r.max_abs_error) {
      r.max_abs_error = err;
      r.argmax_t = t;
    }
  }
  return r;
}

inline WksDemoResult wks_truncation_demo(int n,
                                         WksModel model = WksModel::BandFitted) {
  return wks_truncation_demo(n, uniform_grid(6.0, 1e-3), model);
}

}  // namespace ctfpw
