#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "ctfpw/core/error.hpp"

namespace ctfpw {

/// Dimensionless Fresnel number k*b^2 / (2*pi*d).
inline double fresnel_number(double k, double b, double d) {
  if (!(k > 0.0) || !(b > 0.0) || !(d > 0.0)) {
    throw DomainError("fresnel_number: k, b and d must be positive");
  }
  return k * b * b / (2.0 * std::numbers::pi * d);
}

/// Physical setup of a near-field measurement.
///
/// `k` is the wavenumber, `b` the diameter of the central disc holding the
/// object support and `d` the object-detector distance. Lengths in the
/// normalized frame are y = x / b, frequencies eta = b * xi. The Fresnel
/// number is always derived from (k, b, d), never stored separately.
class FresnelGeometry {
 public:
  FresnelGeometry(double k, double b, double d) : k_(k), b_(b), d_(d) {
    // validates
    (void)ctfpw::fresnel_number(k_, b_, d_);
  }

  /// Geometry with the requested Fresnel number for given b and d.
  static FresnelGeometry from_fresnel_number(double f, double b = 1.0,
                                             double d = 1.0) {
    if (!(f > 0.0)) throw DomainError("Fresnel number must be positive");
    return FresnelGeometry(2.0 * std::numbers::pi * f * d / (b * b), b, d);
  }

  double wavenumber() const { return k_; }
  double support_diameter() const { return b_; }
  double distance() const { return d_; }
  double fresnel_number() const { return ctfpw::fresnel_number(k_, b_, d_); }

  double to_normalized_length(double x) const { return x / b_; }
  double to_normalized_frequency(double xi) const { return xi * b_; }

 private:
  double k_;
  double b_;
  double d_;
};

struct OddFresnel {
  int f_odd;
  // Factor by which the support diameter b is enlarged so that the
  // Fresnel number (proportional to b^2) becomes f_odd.
  double scale;
};

/// Smallest odd integer not below `f_raw`, with the matching b scale.
inline OddFresnel choose_odd_fresnel(double f_raw) {
  if (!(f_raw > 0.0) || !std::isfinite(f_raw)) {
    throw DomainError("choose_odd_fresnel: f must be positive and finite");
  }
  auto f_odd = static_cast<long long>(std::ceil(f_raw));
  if (f_odd % 2 == 0) ++f_odd;
  const double fo = static_cast<double>(f_odd);
  const double scale = (fo == f_raw) ? 1.0 : std::sqrt(fo / f_raw);
  return {static_cast<int>(f_odd), scale};
}

/// Integer value of `f` when it is one within `tol`, otherwise -1.
inline long long integral_fresnel(double f, double tol = 1e-9) {
  const double r = std::round(f);
  if (r >= 1.0 && std::abs(f - r) <= tol * std::max(1.0, r)) {
    return static_cast<long long>(r);
  }
  return -1;
}

}  // namespace ctfpw
