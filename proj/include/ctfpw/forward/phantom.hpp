#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctfpw/core/error.hpp"
#include "ctfpw/core/grid.hpp"

namespace ctfpw {

/// One piece of a piecewise-constant test object. `mu` is its contribution
/// to the cos-channel field, `phi` to the sin-channel field.
struct PhantomComponent {
  enum class Shape { Rect, Disk };
  Shape shape = Shape::Rect;
  Vec2 center;
  Vec2 half_size;  // rect only
  double radius = 0.0;  // disk only
  double mu = 0.0;
  double phi = 0.0;

  static PhantomComponent rect(Vec2 center, Vec2 half_size, double mu,
                               double phi) {
    PhantomComponent c;
    c.shape = Shape::Rect;
    c.center = center;
    c.half_size = half_size;
    c.mu = mu;
    c.phi = phi;
    return c;
  }

  static PhantomComponent disk(Vec2 center, double radius, double mu,
                               double phi) {
    PhantomComponent c;
    c.shape = Shape::Disk;
    c.center = center;
    c.radius = radius;
    c.mu = mu;
    c.phi = phi;
    return c;
  }

  bool contains(Vec2 y) const {
    if (shape == Shape::Rect) {
      return std::abs(y.x1 - center.x1) <= half_size.x1 &&
             std::abs(y.x2 - center.x2) <= half_size.x2;
    }
    const double d1 = y.x1 - center.x1;
    const double d2 = y.x2 - center.x2;
    return d1 * d1 + d2 * d2 <= radius * radius;
  }

  // Largest |y| over the component.
  double outer_radius() const {
    if (shape == Shape::Rect) {
      return std::hypot(std::abs(center.x1) + half_size.x1,
                        std::abs(center.x2) + half_size.x2);
    }
    return center.norm() + radius;
  }
};

struct Phantom {
  std::vector<PhantomComponent> components;

  bool empty() const { return components.empty(); }

  /// Rejects malformed components and anything reaching outside |y| <= 1/2.
  void validate() const {
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto& c = components[i];
      std::ostringstream where;
      where << "phantom component " << i << ": ";
      if (!std::isfinite(c.center.x1) || !std::isfinite(c.center.x2) ||
          !std::isfinite(c.mu) || !std::isfinite(c.phi)) {
        throw ValidationError(where.str() + "non-finite parameter");
      }
      if (c.shape == PhantomComponent::Shape::Rect) {
        if (!(c.half_size.x1 > 0.0) || !(c.half_size.x2 > 0.0)) {
          throw ValidationError(where.str() + "half-sizes must be positive");
        }
      } else if (!(c.radius > 0.0)) {
        throw ValidationError(where.str() + "radius must be positive");
      }
      if (c.outer_radius() > 0.5 + 1e-12) {
        throw ValidationError(where.str() +
                              "extends outside the support disc |y| <= 1/2");
      }
    }
  }

  static Phantom rect(Vec2 half_size, double mu, double phi,
                      Vec2 center = {0.0, 0.0}) {
    return Phantom{{PhantomComponent::rect(center, half_size, mu, phi)}};
  }
};

inline void to_json(nlohmann::json& j, const PhantomComponent& c) {
  j = nlohmann::json::object();
  j["center"] = {c.center.x1, c.center.x2};
  if (c.shape == PhantomComponent::Shape::Rect) {
    j["shape"] = "rect";
    j["size"] = {c.half_size.x1, c.half_size.x2};
  } else {
    j["shape"] = "disk";
    j["radius"] = c.radius;
  }
  j["mu"] = c.mu;
  j["phi"] = c.phi;
}

inline void from_json(const nlohmann::json& j, PhantomComponent& c) {
  try {
    const std::string shape = j.at("shape").get<std::string>();
    const auto center = j.value("center", std::vector<double>{0.0, 0.0});
    if (center.size() != 2) throw ValidationError("center must have 2 entries");
    c.center = {center[0], center[1]};
    c.mu = j.value("mu", 0.0);
    c.phi = j.value("phi", 0.0);
    if (shape == "rect") {
      c.shape = PhantomComponent::Shape::Rect;
      const auto size = j.at("size").get<std::vector<double>>();
      if (size.size() != 2) throw ValidationError("size must have 2 entries");
      c.half_size = {size[0], size[1]};
    } else if (shape == "disk") {
      c.shape = PhantomComponent::Shape::Disk;
      c.radius = j.at("radius").get<double>();
    } else {
      throw ValidationError("unknown shape '" + shape + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed phantom component: ") +
                          e.what());
  }
}

inline void to_json(nlohmann::json& j, const Phantom& p) {
  j = nlohmann::json{{"components", p.components}};
}

inline void from_json(const nlohmann::json& j, Phantom& p) {
  if (!j.is_object() || !j.contains("components") ||
      !j["components"].is_array()) {
    throw ValidationError("phantom JSON needs a \"components\" array");
  }
  p.components = j["components"].get<std::vector<PhantomComponent>>();
}

inline Phantom parse_phantom(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("phantom JSON: ") + e.what());
  }
  Phantom p = j.get<Phantom>();
  p.validate();
  return p;
}

/// The cos-channel (mu) and sin-channel (phi) fields of an object.
struct ProjectionPair {
  RealField2D mu;
  RealField2D phi;

  explicit ProjectionPair(const Grid2D& g) : mu(g), phi(g) {}
  ProjectionPair(RealField2D m, RealField2D p)
      : mu(std::move(m)), phi(std::move(p)) {
    if (!(mu.grid() == phi.grid())) {
      throw ContractError("projection pair fields live on different grids");
    }
  }
  const Grid2D& grid() const { return mu.grid(); }
};

/// Pointwise samples of the indicator phantom (edges inclusive).
inline ProjectionPair phantom_fields(const Phantom& phantom, const Grid2D& grid) {
  if (grid.extent() < 1.0) throw DomainError("grid extent must be >= 1");
  phantom.validate();
  ProjectionPair out(grid);
  const int n = grid.n();
  for (const auto& c : phantom.components) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (c.contains(grid.point(i, j))) {
          out.mu(i, j) += c.mu;
          out.phi(i, j) += c.phi;
        }
      }
    }
  }
  return out;
}

/// Bessel function J1 from the standard library.
inline double bessel_j1(double x) {
  if (x < 0.0) return -std::cyl_bessel_j(1.0, -x);
  return std::cyl_bessel_j(1.0, x);
}

/// Fourier transform of a unit indicator component at eta.
inline std::complex<double> component_transform(const PhantomComponent& c,
                                                  Vec2 eta) {
  const double pi = std::numbers::pi;
  double shape_ft;
  if (c.shape == PhantomComponent::Shape::Rect) {
    auto sinc = [pi](double u) {
      if (u == 0.0) return 1.0;
      return std::sin(pi * u) / (pi * u);
    };
    const double a = c.half_size.x1;
    const double b = c.half_size.x2;
    shape_ft = 4.0 * a * b * sinc(2.0 * a * eta.x1) * sinc(2.0 * b * eta.x2);
  } else {
    const double rho = eta.norm();
    const double r = c.radius;
    shape_ft = rho < 1e-300 ? pi * r * r
                            : r * bessel_j1(2.0 * pi * r * rho) / rho;
  }
  return shape_ft * std::polar(1.0, -2.0 * pi * c.center.dot(eta));
}

struct SpectrumPair {
  std::vector<std::complex<double>> mu_hat;
  std::vector<std::complex<double>> phi_hat;
};

/// Closed-form spectra of both channels at the given frequencies.
inline SpectrumPair phantom_spectrum(const Phantom& phantom,
                                     std::span<const Vec2> points) {
  SpectrumPair out;
  out.mu_hat.assign(points.size(), 0.0);
  out.phi_hat.assign(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (const auto& c : phantom.components) {
      const auto v = component_transform(c, points[p]);
      out.mu_hat[p] += c.mu * v;
      out.phi_hat[p] += c.phi * v;
    }
  }
  return out;
}

inline std::pair<std::complex<double>, std::complex<double>> phantom_spectrum(
    const Phantom& phantom, Vec2 eta) {
  std::complex<double> m = 0.0;
  std::complex<double> f = 0.0;
  for (const auto& c : phantom.components) {
    const auto v = component_transform(c, eta);
    m += c.mu * v;
    f += c.phi * v;
  }
  return {m, f};
}

}  // namespace ctfpw
