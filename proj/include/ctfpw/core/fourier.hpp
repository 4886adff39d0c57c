#pragma once

// Continuous Fourier transform convention
//
//   F(a)(eta) = integral of a(y) exp(-2 pi i y.eta) dy
//
// discretized on a centered Grid2D. With y_j = (j - n/2) dy and
// eta_m = (m - n/2) / L the kernel factors as
//
//   exp(-2 pi i y_j eta_m) = (-1)^(j + m) (-1)^(n/2) exp(-2 pi i j m / n)
//
// per axis; for even n the (-1)^(n/2) factors cancel in 2D, so the centered
// transform is an ordinary DFT bracketed by checkerboard sign flips.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "ctfpw/core/grid.hpp"
#include "ctfpw/core/parallel.hpp"

namespace ctfpw {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// fftw_malloc'd buffer; keeps alignment (and thus codelet choice) stable
// across calls.
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t count)
      : data_(static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * count))),
        count_(count) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* get() { return data_; }
  std::complex<double>* as_complex() {
    return reinterpret_cast<std::complex<double>*>(data_);
  }
  std::size_t size() const { return count_; }

 private:
  fftw_complex* data_;
  std::size_t count_;
};

inline double checkerboard(int i, int j) { return ((i + j) & 1) ? -1.0 : 1.0; }

inline ComplexField2D centered_dft(const ComplexField2D& in, int sign,
                                   double weight) {
  const int n = in.n();
  FftwBuffer buf(in.grid().size());
  auto* z = buf.as_complex();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      z[static_cast<std::size_t>(i) * n + j] = checkerboard(i, j) * in(i, j);
    }
  }
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(n, n, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  ComplexField2D out(in.grid());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) =
          (weight * checkerboard(i, j)) * z[static_cast<std::size_t>(i) * n + j];
    }
  }
  return out;
}

}  // namespace detail

/// Spectrum at the grid's frequency nodes, including the dy^2 area weight.
inline ComplexField2D fft2_forward(const ComplexField2D& field) {
  const double dy = field.grid().spacing();
  return detail::centered_dft(field, FFTW_FORWARD, dy * dy);
}

inline ComplexField2D fft2_forward(const RealField2D& field) {
  return fft2_forward(to_complex(field));
}

/// Inverse of fft2_forward (weight d_eta^2 = 1 / L^2).
inline ComplexField2D fft2_inverse(const ComplexField2D& spectrum) {
  const double de = spectrum.grid().freq_spacing();
  return detail::centered_dft(spectrum, FFTW_BACKWARD, de * de);
}

/// Direct-sum transform of a real field at arbitrary frequency points:
/// sum_j field(y_j) exp(-2 pi i y_j.eta) dy^2.
///
/// The kernel is separable, so each point costs one pass over the field
/// with precomputed per-axis phase vectors; no approximation is made.
template <class T>
std::vector<std::complex<double>> nudft_at(const Field2D<T>& field,
                                           std::span<const Vec2> points,
                                           unsigned threads = 1) {
  const Grid2D& g = field.grid();
  const int n = g.n();
  const double dy = g.spacing();
  const auto values = field.values();
  std::vector<std::complex<double>> out(points.size());

  parallel_for(points.size(), threads, [&](std::size_t p) {
    const Vec2 eta = points[p];
    std::vector<std::complex<double>> e1(n), e2(n);
    for (int j = 0; j < n; ++j) {
      const double y = g.coord(j);
      e1[j] = std::polar(1.0, -2.0 * std::numbers::pi * y * eta.x1);
      e2[j] = std::polar(1.0, -2.0 * std::numbers::pi * y * eta.x2);
    }
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto* row = values.data() + static_cast<std::size_t>(i) * n;
      double re = 0.0;
      double im = 0.0;
      if constexpr (std::is_floating_point_v<T>) {
        for (int j = 0; j < n; ++j) {
          re += row[j] * e2[j].real();
          im += row[j] * e2[j].imag();
        }
      } else {
        for (int j = 0; j < n; ++j) {
          const auto v = row[j] * e2[j];
          re += v.real();
          im += v.imag();
        }
      }
      acc += e1[i] * std::complex<double>(re, im);
    }
    out[p] = acc * (dy * dy);
  });
  return out;
}

template <class T>
std::complex<double> nudft_at(const Field2D<T>& field, Vec2 eta) {
  const Vec2 pts[1] = {eta};
  return nudft_at(field, std::span<const Vec2>(pts), 1)[0];
}

}  // namespace ctfpw
