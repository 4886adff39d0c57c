#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ctfpw/core/error.hpp"

namespace ctfpw {

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  double norm_sq() const { return x1 * x1 + x2 * x2; }
  double norm() const { return std::hypot(x1, x2); }
  double dot(const Vec2& o) const { return x1 * o.x1 + x2 * o.x2; }
  Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
  Vec2 operator-() const { return {-x1, -x2}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Square, centered sampling grid in normalized coordinates.
///
/// Samples sit at y_j = (j - n/2) * dy with dy = extent / n; the dual
/// frequency nodes are eta_m = (m - n/2) / extent.
class Grid2D {
 public:
  Grid2D(int n, double extent) : n_(n), extent_(extent) {
    if (n <= 0 || n % 2 != 0) {
      throw DomainError("Grid2D: n must be a positive even integer");
    }
    if (!(extent > 0.0) || !std::isfinite(extent)) {
      throw DomainError("Grid2D: extent must be positive");
    }
  }

  int n() const { return n_; }
  double extent() const { return extent_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  double spacing() const { return extent_ / n_; }
  double coord(int j) const { return (j - n_ / 2) * spacing(); }

  double freq_spacing() const { return 1.0 / extent_; }
  double freq(int m) const { return (m - n_ / 2) / extent_; }

  Vec2 point(int i, int j) const { return {coord(i), coord(j)}; }
  Vec2 freq_point(int m1, int m2) const { return {freq(m1), freq(m2)}; }

  // Largest |eta| over the frequency nodes (the corner node).
  double max_freq_radius() const {
    const double e = std::abs(freq(0));
    return std::hypot(e, e);
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int n_;
  double extent_;
};

/// n x n samples in row-major order; index (i, j) is (y1 index, y2 index).
///
/// A spectrum produced by fft2_forward uses the same type with (i, j)
/// read as frequency indices (m1, m2) of the same grid.
template <class T>
class Field2D {
 public:
  using value_type = T;

  explicit Field2D(Grid2D grid) : grid_(grid), values_(grid.size(), T{}) {}

  Field2D(Grid2D grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ContractError("Field2D: value count does not match grid");
    }
    if (!all_finite()) throw DomainError("Field2D: non-finite entries");
  }

  const Grid2D& grid() const { return grid_; }
  int n() const { return grid_.n(); }

  T& operator()(int i, int j) { return values_[index(i, j)]; }
  const T& operator()(int i, int j) const { return values_[index(i, j)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& storage() { return values_; }

  bool all_finite() const {
    for (const auto& v : values_) {
      if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) return false;
      } else {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      }
    }
    return true;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.n()) +
           static_cast<std::size_t>(j);
  }

  Grid2D grid_;
  std::vector<T> values_;
};

using RealField2D = Field2D<double>;
using ComplexField2D = Field2D<std::complex<double>>;

inline ComplexField2D to_complex(const RealField2D& f) {
  ComplexField2D out(f.grid());
  auto src = f.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  return out;
}

inline RealField2D real_part(const ComplexField2D& f) {
  RealField2D out(f.grid());
  auto src = f.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i].real();
  return out;
}

/// Direction in the frequency plane, angle in [0, pi).
class Direction {
 public:
  explicit Direction(double angle) : angle_(angle) {
    if (!(angle >= 0.0) || !(angle < std::numbers::pi)) {
      throw DomainError("Direction: angle must lie in [0, pi)");
    }
  }

  // d-th of `count` uniformly spaced directions.
  static Direction uniform(int d, int count) {
    return Direction(d * std::numbers::pi / count);
  }

  double angle() const { return angle_; }
  Vec2 unit() const { return {std::cos(angle_), std::sin(angle_)}; }

 private:
  double angle_;
};

}  // namespace ctfpw
