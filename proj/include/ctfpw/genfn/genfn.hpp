#pragma once

// Generating functions for the one-step CTF inversion.
//
// A phase generating function Z_f is an even entire function of sine type
// whose real zeros lambda all satisfy lambda^2 = f (l + 1/2) for an integer
// l, i.e. they sit where cos(pi |eta|^2 / f) vanishes. The attenuation
// analogue W_f has zeros with lambda^2 = f l (where the sine vanishes).
//
// For odd f = 2p + 1 both are products of f cosine factors in
// s_q = sqrt(lambda^2 + c_q), paired so that each pair is an even function
// of s_q, times a rational correction R that removes the multiple zero the
// raw product has at one point and adds admissible simple zeros instead.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctfpw/core/error.hpp"

namespace ctfpw {

enum class GenFnKind { Phase, Attenuation };

inline std::string_view to_string(GenFnKind kind) {
  return kind == GenFnKind::Phase ? "phase" : "attenuation";
}

inline GenFnKind parse_genfn_kind(std::string_view s) {
  if (s == "phase") return GenFnKind::Phase;
  if (s == "attenuation") return GenFnKind::Attenuation;
  throw UnsupportedConfiguration("unknown generating-function kind: " +
                                 std::string(s));
}

/// One factor of the raw product, a function of rho = lambda^2 + offset.
struct RootFactor {
  enum class Form {
    Cosine,        // cos(rate * s)
    PairedCosine,  // cos(rate (s + shift)) * cos(rate (s + period - shift))
    Sine,          // sin(rate * s); odd in s, only in the explicit f = 4 form
  };
  Form form = Form::Cosine;
  double rate = 0.0;
  double offset = 0.0;
  int shift = 0;
  int period = 0;
  // Value of s where the leading cosine reaches pi/2 (0 when unused) and
  // offset - center^2, kept exact so rho - center^2 has no cancellation.
  double center = 0.0;
  double excess = 0.0;
};

class GenFn {
 public:
  using complex = std::complex<double>;

  /// Builds Z_f (Phase) or W_f (Attenuation).
  ///
  /// Odd f uses the general paired construction for both kinds; Phase also
  /// accepts the explicit forms at f = 2 and f = 4. Anything else throws
  /// UnsupportedConfiguration.
  static GenFn build(GenFnKind kind, int f) {
    if (f <= 0) throw UnsupportedConfiguration("Fresnel number must be >= 1");
    GenFn g;
    g.kind_ = kind;
    g.f_ = f;
    const double pi = std::numbers::pi;
    if (f % 2 == 1) {
      const int p = (f - 1) / 2;
      const double fd = f;
      const double rate = pi / fd;
      g.p_ = p;
      auto offset = [&](int q) {
        const double u = fd / 2.0 - q;
        return kind == GenFnKind::Phase ? -fd / 2.0 + u * u : u * u;
      };
      const double excess = kind == GenFnKind::Phase ? -fd / 2.0 : 0.0;
      g.factors_.push_back(
          {RootFactor::Form::Cosine, rate, offset(0), 0, 0, fd / 2.0,
           excess});
      for (int q = 1; q <= p; ++q) {
        g.factors_.push_back({RootFactor::Form::PairedCosine, rate, offset(q),
                              q, f, fd / 2.0 - q, excess});
      }
      if (kind == GenFnKind::Phase) {
        for (int q = 1; q <= p; ++q) {
          g.correction_roots_.push_back(fd * (2.0 * q - 0.5));
        }
        g.pole_root_ = fd / 2.0;
        g.pole_order_ = p;
      } else {
        for (int q = 0; q <= p; ++q) {
          g.correction_roots_.push_back((2.0 * q + 1.0) * fd);
        }
        g.pole_root_ = 0.0;
        g.pole_order_ = p + 1;
      }
      return g;
    }
    if (kind == GenFnKind::Phase && f == 2) {
      g.factors_.push_back({RootFactor::Form::Cosine, pi, -0.75, 0, 0});
      return g;
    }
    if (kind == GenFnKind::Phase && f == 4) {
      g.factors_.push_back({RootFactor::Form::Sine, pi / 2.0, -2.0, 0, 0});
      g.factors_.push_back({RootFactor::Form::Cosine, pi / 2.0, -1.0, 0, 0});
      g.correction_roots_.push_back(14.0);
      g.pole_root_ = 2.0;
      g.pole_order_ = 1;
      return g;
    }
    std::ostringstream msg;
    msg << "no generating function for kind=" << to_string(kind) << " f=" << f
        << " (odd f is supported for both kinds, phase additionally f=2,4; "
           "use choose_odd_fresnel to move to the next odd Fresnel number)";
    throw UnsupportedConfiguration(msg.str());
  }

  GenFnKind kind() const { return kind_; }
  int fresnel() const { return f_; }
  // p = (f - 1) / 2 for odd f, 0 otherwise.
  int half_order() const { return p_; }
  const std::vector<RootFactor>& factors() const { return factors_; }
  // Values of lambda^2 where the correction numerator vanishes.
  const std::vector<double>& correction_roots() const {
    return correction_roots_;
  }
  // Correction denominator (lambda^2 - pole_root)^pole_order.
  double pole_root() const { return pole_root_; }
  int pole_order() const { return pole_order_; }

  // The explicit f = 4 form contains a factor odd in its square root and is
  // not single-valued off the real axis.
  bool is_entire() const {
    for (const auto& fac : factors_) {
      if (fac.form == RootFactor::Form::Sine) return false;
    }
    return true;
  }

  double removable_step(double t) const {
    return 1e-6 * std::max(1.0, std::abs(t));
  }
  // The quotient rule cancels badly next to the pole, so the derivative is
  // bridged over a wider window.
  double derivative_step(double t) const {
    return 1e-3 * std::max(1.0, std::abs(t));
  }

  /// Value on the complex plane (principal square roots).
  complex eval_complex(complex z) const {
    if (pole_order_ > 0) {
      const double h = removable_step(std::abs(z));
      for (double pole : pole_points()) {
        if (std::abs(z - pole) < h) {
          return interpolate_across_pole(
              [this](complex w) { return raw_complex(w); }, z, pole, h);
        }
      }
    }
    return raw_complex(z);
  }

  /// Value on the real axis.
  double eval(double t) const {
    if (!is_entire()) {
      // Branch point at the pole: the quotient vanishes like a square root.
      if (t * t == pole_root_) return 0.0;
      return raw_real(t);
    }
    if (pole_order_ > 0) {
      const double h = removable_step(t);
      for (double pole : pole_points()) {
        if (std::abs(t - pole) < h) {
          return interpolate_across_pole(
              [this](double w) { return raw_real(w); }, t, pole, h);
        }
      }
    }
    return raw_real(t);
  }

  /// Analytic derivative on the real axis.
  ///
  /// Product rule over the factors, quotient rule for R. At the pole of R,
  /// where the raw product has its multiple zero, the vanishing factors are
  /// deflated analytically; elsewhere near the pole the derivative is
  /// interpolated across it like eval().
  double derivative(double t) const {
    if (!is_entire()) {
      for (double pole : pole_points()) {
        if (t == pole) return deflated_derivative_at_pole(pole);
      }
      return raw_derivative(t);
    }
    if (pole_order_ > 0) {
      const double h = derivative_step(t);
      for (double pole : pole_points()) {
        const double dist = std::abs(t - pole);
        if (dist < h) {
          if (dist <= 1e-12 * std::max(1.0, std::abs(t))) {
            return deflated_derivative_at_pole(pole);
          }
          return interpolate_across_pole(
              [this](double w) { return raw_derivative(w); }, t, pole,
              derivative_step(t));
        }
      }
    }
    return raw_derivative(t);
  }

  /// Derivative at a tabulated zero; throws DegenerateZeroError when it
  /// vanishes (|Z'| <= 1e-8) since that means the zero is not simple.
  double derivative_at(double lambda) const {
    const double d = derivative(lambda);
    if (!(std::abs(d) > kSimplicityThreshold)) {
      std::ostringstream msg;
      msg << "derivative " << d << " at lambda=" << lambda
          << " below simplicity threshold for " << describe();
      throw DegenerateZeroError(msg.str());
    }
    return d;
  }

  std::string describe() const {
    std::ostringstream s;
    s << (kind_ == GenFnKind::Phase ? "Z" : "W") << "_" << f_;
    return s.str();
  }

  static constexpr double kSimplicityThreshold = 1e-8;

 private:
  GenFn() = default;

  // Real-axis points where R has its pole.
  std::vector<double> pole_points() const {
    if (pole_order_ == 0) return {};
    if (pole_root_ == 0.0) return {0.0};
    const double r = std::sqrt(pole_root_);
    return {-r, r};
  }

  // Cubic Lagrange interpolation through pole +- h, pole +- 2h.
  template <class Fn, class T>
  static T interpolate_across_pole(Fn&& fn, T x, double pole, double h) {
    const double nodes[4] = {pole - 2 * h, pole - h, pole + h, pole + 2 * h};
    T vals[4];
    for (int i = 0; i < 4; ++i) vals[i] = fn(T(nodes[i]));
    T acc = T(0);
    for (int i = 0; i < 4; ++i) {
      T w = T(1);
      for (int j = 0; j < 4; ++j) {
        if (j != i) w *= (x - nodes[j]) / (nodes[i] - nodes[j]);
      }
      acc += w * vals[i];
    }
    return acc;
  }

  // sin(rate * sqrt(rho)) / sqrt(rho), real rho of either sign.
  static double sin_over_root(double rate, double rho) {
    const double a = std::abs(rho);
    if (a < 1e-12) return rate * (1.0 - rate * rate * rho / 6.0);
    const double s = std::sqrt(a);
    return rho > 0.0 ? std::sin(rate * s) / s : std::sinh(rate * s) / s;
  }

  // cos(rate (s + shift)) = -sin(rate (s - center)) when
  // rate (center + shift) = pi / 2; s - center is formed without cancellation.
  template <class T>
  static T leading_cosine(const RootFactor& fac, T lambda_sq, T s) {
    if (fac.center > 0.0) {
      const T diff = (lambda_sq + fac.excess) / (s + fac.center);
      return -std::sin(fac.rate * diff);
    }
    return std::cos(fac.rate * (s + double(fac.shift)));
  }

  static complex factor_complex(const RootFactor& fac, complex lambda_sq) {
    const complex rho = lambda_sq + fac.offset;
    const complex s = std::sqrt(rho);
    switch (fac.form) {
      case RootFactor::Form::Cosine:
        return leading_cosine(fac, lambda_sq, s);
      case RootFactor::Form::PairedCosine:
        return leading_cosine(fac, lambda_sq, s) *
               std::cos(fac.rate * (s + double(fac.period - fac.shift)));
      case RootFactor::Form::Sine:
        return std::sin(fac.rate * s);
    }
    return 0.0;
  }

  static double factor_real(const RootFactor& fac, double lambda_sq) {
    const double rho = lambda_sq + fac.offset;
    switch (fac.form) {
      case RootFactor::Form::Cosine:
        return rho >= 0.0 ? leading_cosine(fac, lambda_sq, std::sqrt(rho))
                          : std::cosh(fac.rate * std::sqrt(-rho));
      case RootFactor::Form::PairedCosine:
        if (rho >= 0.0) {
          const double s = std::sqrt(rho);
          return leading_cosine(fac, lambda_sq, s) *
                 std::cos(fac.rate * (s + fac.period - fac.shift));
        }
        return factor_complex(fac, complex(lambda_sq, 0.0)).real();
      case RootFactor::Form::Sine:
        // Signed-root continuation through rho = 0 keeps the value real.
        return rho >= 0.0 ? std::sin(fac.rate * std::sqrt(rho))
                          : -std::sinh(fac.rate * std::sqrt(-rho));
    }
    return 0.0;
  }

  // d factor / d rho on the real axis.
  static double factor_drho(const RootFactor& fac, double lambda_sq) {
    const double rho = lambda_sq + fac.offset;
    switch (fac.form) {
      case RootFactor::Form::Cosine:
        return -0.5 * fac.rate * sin_over_root(fac.rate, rho);
      case RootFactor::Form::PairedCosine:
        // Product rule: -rate [sin A cos B + cos A sin B] / (2 s) with
        // A + B = rate (2 s + period) = 2 rate s + pi.
        return 0.5 * fac.rate * sin_over_root(2.0 * fac.rate, rho);
      case RootFactor::Form::Sine: {
        const double a = std::abs(rho);
        if (a == 0.0) return std::numeric_limits<double>::infinity();
        const double s = std::sqrt(a);
        return rho > 0.0 ? 0.5 * fac.rate * std::cos(fac.rate * s) / s
                         : 0.5 * fac.rate * std::cosh(fac.rate * s) / s;
      }
    }
    return 0.0;
  }

  template <class T>
  T numerator(T lambda_sq) const {
    T v = T(1);
    for (double c : correction_roots_) v *= (lambda_sq - c);
    return v;
  }

  template <class T>
  T denominator(T lambda_sq) const {
    T v = T(1);
    for (int i = 0; i < pole_order_; ++i) v *= (lambda_sq - pole_root_);
    return v;
  }

  complex raw_complex(complex z) const {
    const complex u = z * z;
    complex v = 1.0;
    for (const auto& fac : factors_) v *= factor_complex(fac, u);
    return v * numerator(u) / denominator(u);
  }

  double raw_real(double t) const {
    const double u = t * t;
    double v = 1.0;
    for (const auto& fac : factors_) v *= factor_real(fac, u);
    return v * numerator(u) / denominator(u);
  }

  double raw_derivative(double t) const {
    const double u = t * t;
    const std::size_t nf = factors_.size();
    std::vector<double> val(nf), dval(nf);
    for (std::size_t i = 0; i < nf; ++i) {
      val[i] = factor_real(factors_[i], u);
      dval[i] = factor_drho(factors_[i], u) * 2.0 * t;
    }
    double prod = 1.0;
    for (double v : val) prod *= v;
    double dprod = 0.0;
    for (std::size_t i = 0; i < nf; ++i) {
      if (dval[i] == 0.0) continue;
      double term = dval[i];
      for (std::size_t j = 0; j < nf; ++j) {
        if (j != i) term *= val[j];
      }
      dprod += term;
    }
    if (correction_roots_.empty() && pole_order_ == 0) return dprod;

    const double num = numerator(u);
    double dnum = 0.0;  // d/du
    for (std::size_t i = 0; i < correction_roots_.size(); ++i) {
      double term = 1.0;
      for (std::size_t j = 0; j < correction_roots_.size(); ++j) {
        if (j != i) term *= (u - correction_roots_[j]);
      }
      dnum += term;
    }
    const double den = denominator(u);
    const double dden =
        pole_order_ == 0
            ? 0.0
            : pole_order_ * std::pow(u - pole_root_, pole_order_ - 1);
    const double r = num / den;
    const double dr = 2.0 * t * (dnum * den - num * dden) / (den * den);
    return dprod * r + prod * dr;
  }

  // Z near u = pole_root: the vanishing factors behave like G_i'(u0)(u - u0).
  double deflated_derivative_at_pole(double pole) const {
    const double u0 = pole_root_;
    double deflated = 1.0;
    double others = 1.0;
    int vanishing = 0;
    for (const auto& fac : factors_) {
      const double v = factor_real(fac, u0);
      if (std::abs(v) < 1e-12) {
        deflated *= factor_drho(fac, u0);
        ++vanishing;
      } else {
        others *= v;
      }
    }
    const double rest = deflated * others * numerator(u0);
    const int order = vanishing - pole_order_;  // order of the zero in u
    if (order <= 0) {
      // Not a zero of Z (attenuation at the origin): even function, Z'(0)=0.
      return 0.0;
    }
    if (order > 1) return 0.0;
    if (std::isinf(rest)) {
      return std::copysign(std::numeric_limits<double>::infinity(),
                           rest * pole);
    }
    return 2.0 * pole * rest;
  }

  GenFnKind kind_ = GenFnKind::Phase;
  int f_ = 1;
  int p_ = 0;
  std::vector<RootFactor> factors_;
  std::vector<double> correction_roots_;
  double pole_root_ = 0.0;
  int pole_order_ = 0;
};

}  // namespace ctfpw
