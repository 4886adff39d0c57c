#pragma once

// Contrast transfer model in normalized coordinates.
//
// The object enters through psi = mu + i phi. Free-space propagation is the
// unitary multiplier m_f(eta) = exp(-i pi |eta|^2 / f), and the linearized
// hologram I = 1 + 2 Re D(psi) has CTF data Psi = (I - 1) / 2 with spectrum
//
//   Psi^(eta) = cos(pi |eta|^2 / f) mu^(eta) + sin(pi |eta|^2 / f) phi^(eta).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string_view>

#include "ctfpw/core/error.hpp"
#include "ctfpw/core/fourier.hpp"
#include "ctfpw/core/geometry.hpp"
#include "ctfpw/core/grid.hpp"
#include "ctfpw/forward/phantom.hpp"

namespace ctfpw {

inline std::complex<double> ctf_transfer(double f, Vec2 eta,
                                         std::complex<double> mu_hat,
                                         std::complex<double> phi_hat) {
  if (!(f > 0.0)) throw DomainError("Fresnel number must be positive");
  const double a = std::numbers::pi * eta.norm_sq() / f;
  return std::cos(a) * mu_hat + std::sin(a) * phi_hat;
}

/// Applies D = F^-1 m_f F. Negative f applies the adjoint.
inline ComplexField2D fresnel_propagate(const ComplexField2D& field, double f) {
  if (f == 0.0 || !std::isfinite(f)) {
    throw DomainError("Fresnel number must be finite and nonzero");
  }
  ComplexField2D spec = fft2_forward(field);
  const Grid2D& g = spec.grid();
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = std::numbers::pi * g.freq_point(i, j).norm_sq() / f;
      spec(i, j) *= std::polar(1.0, -a);
    }
  }
  return fft2_inverse(spec);
}

enum class HologramModel { Linear, Full };

inline std::string_view to_string(HologramModel m) {
  return m == HologramModel::Linear ? "linear" : "full";
}

inline HologramModel parse_hologram_model(std::string_view s) {
  if (s == "linear") return HologramModel::Linear;
  if (s == "full") return HologramModel::Full;
  throw UnsupportedConfiguration("unknown hologram model: " + std::string(s));
}

struct Hologram {
  RealField2D intensity;
  FresnelGeometry geometry;
  HologramModel model;

  double fresnel() const { return geometry.fresnel_number(); }
  const Grid2D& grid() const { return intensity.grid(); }
};

/// Psi = (I - 1) / 2.
inline RealField2D ctf_data(const Hologram& h) {
  RealField2D out(h.grid());
  auto src = h.intensity.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 0.5 * (src[i] - 1.0);
  return out;
}

inline ComplexField2D object_psi(const ProjectionPair& pair) {
  ComplexField2D psi(pair.grid());
  auto m = pair.mu.values();
  auto p = pair.phi.values();
  auto out = psi.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {m[i], p[i]};
  return psi;
}

// Largest |value| of either field outside the disc |y| <= 1/2.
inline double leakage_outside_support(const ProjectionPair& pair) {
  const Grid2D& g = pair.grid();
  double worst = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      if (g.point(i, j).norm_sq() <= 0.25) continue;
      worst = std::max({worst, std::abs(pair.mu(i, j)), std::abs(pair.phi(i, j))});
    }
  }
  return worst;
}

inline Hologram simulate_hologram(const ProjectionPair& pair, double f,
                                  HologramModel model) {
  if (!(f > 0.0)) throw DomainError("Fresnel number must be positive");
  const Grid2D& g = pair.grid();
  if (g.extent() < 2.0) {
    throw DomainError("simulation grid must be padded to extent >= 2");
  }
  if (const double leak = leakage_outside_support(pair); leak > 1e-14) {
    std::ostringstream msg;
    msg << "object is not supported in |y| <= 1/2 (max outside = " << leak
        << ")";
    throw ValidationError(msg.str());
  }
  ComplexField2D psi = object_psi(pair);
  RealField2D intensity(g);
  auto out = intensity.values();
  if (model == HologramModel::Linear) {
    const ComplexField2D d = fresnel_propagate(psi, f);
    auto dv = d.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 + 2.0 * dv[i].real();
  } else {
    double peak = 0.0;
    for (auto& v : psi.values()) {
      peak = std::max(peak, std::abs(v));
      v = std::exp(v);
    }
    if (peak > 5.0) {
      std::ostringstream msg;
      msg << "max |psi| = " << peak << " exceeds the overflow guard of 5";
      throw OverflowGuardError(msg.str());
    }
    const ComplexField2D d = fresnel_propagate(psi, f);
    auto dv = d.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(dv[i]);
  }
  return Hologram{std::move(intensity), FresnelGeometry::from_fresnel_number(f),
                  model};
}

}  // namespace ctfpw
