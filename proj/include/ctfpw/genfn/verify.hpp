#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ctfpw/genfn/genfn.hpp"
#include "ctfpw/genfn/zero_table.hpp"

namespace ctfpw {

struct ValidationReport {
  std::size_t checked = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  void fail(std::string msg) { failures.push_back(std::move(msg)); }
  void merge(const ValidationReport& other) {
    checked += other.checked;
    failures.insert(failures.end(), other.failures.begin(),
                    other.failures.end());
  }
};

struct ZeroIdentityTolerances {
  double lambda_sq = 1e-9;
  double trig = 1e-10;
  double eval_rel = 1e-8;
  double simplicity = GenFn::kSimplicityThreshold;
};

namespace detail {

// cos(pi x) and sin(pi x) with x reduced modulo 2 first.
inline std::pair<double, double> cos_sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  const double a = std::numbers::pi * r;
  return {std::cos(a), std::sin(a)};
}

}  // namespace detail

/// Per-entry checks of the zero identities, the sign pattern (-1)^l,
/// vanishing of the function and simplicity of the zero.
inline ValidationReport check_zero_identities(
    const ZeroTable& table, const GenFn& g,
    const ZeroIdentityTolerances& tol = {}) {
  ValidationReport rep;
  const int f = g.fresnel();
  const bool phase = g.kind() == GenFnKind::Phase;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const ZeroEntry& e = table[i];
    ++rep.checked;
    auto report = [&](const std::string& what, double value) {
      std::ostringstream s;
      s.precision(12);
      s << g.describe() << " zero #" << i << " (" << e.family.tag()
        << ", lambda=" << e.lambda << ", l=" << e.l << "): " << what << " = "
        << value;
      rep.fail(s.str());
    };
    if (e.l < 0) report("negative parity index", double(e.l));
    const double expected_sq = detail::zero_lambda_sq(g.kind(), f, e.l);
    if (std::abs(e.lambda_sq - expected_sq) > tol.lambda_sq) {
      report("|lambda_sq - closed form|", std::abs(e.lambda_sq - expected_sq));
    }
    const double sq_err = std::abs(e.lambda * e.lambda - expected_sq);
    if (!(sq_err <= tol.lambda_sq)) report("|lambda^2 - closed form|", sq_err);

    const auto [c, s] = detail::cos_sin_pi(e.lambda_sq / f);
    const double sign = (e.l % 2 == 0) ? 1.0 : -1.0;
    const double vanishing = phase ? c : s;
    const double surviving = phase ? s : c;
    if (!(std::abs(vanishing) <= tol.trig)) {
      report(phase ? "|cos(pi lambda^2/f)|" : "|sin(pi lambda^2/f)|",
             std::abs(vanishing));
    }
    if (!(std::abs(surviving - sign) <= tol.trig)) {
      report("sign identity residual", std::abs(surviving - sign));
    }

    const double d = g.derivative(e.lambda);
    if (!(std::abs(d) > tol.simplicity)) report("|dZ| (not simple)", d);
    if (!(std::abs(e.dZ - d) <= 1e-12 * std::abs(d) || std::isinf(d))) {
      report("stored dZ mismatch", e.dZ - d);
    }
    const double z = g.eval(e.lambda);
    const double scale = std::abs(d) * std::max(1.0, e.lambda);
    if (!(std::abs(z) <= tol.eval_rel * scale || std::isinf(scale))) {
      report("|Z(lambda)| relative to local scale", z / scale);
    }
  }
  return rep;
}

/// Interlacing of the main series and the large-k spacing law
/// lambda_{k,q} = f (k + 1/2) - q + O(1/k), checked on the last
/// `tail_fraction` of the table against the bound 2/k.
inline ValidationReport check_ordering(const ZeroTable& table, const GenFn& g,
                                       double tail_fraction = 0.2) {
  ValidationReport rep;
  const int f = g.fresnel();
  if (f % 2 == 0) return rep;
  const int p = g.half_order();
  using S = ZeroFamily::Series;

  std::map<std::pair<int, int>, double> main_a;
  for (const auto& e : table) {
    if (e.family.series == S::MainA) main_a[{e.family.k, e.family.q}] = e.lambda;
  }
  for (int k = 1;; ++k) {
    auto next = main_a.find({k + 1, p});
    if (next == main_a.end()) break;
    double prev = -std::numeric_limits<double>::infinity();
    for (int q = p; q >= 0; --q) {
      auto it = main_a.find({k, q});
      if (it == main_a.end()) {
        std::ostringstream s;
        s << g.describe() << " missing main-series zero k=" << k << " q=" << q;
        rep.fail(s.str());
        break;
      }
      ++rep.checked;
      if (!(it->second > prev)) {
        std::ostringstream s;
        s << g.describe() << " ordering violated at k=" << k << " q=" << q;
        rep.fail(s.str());
      }
      prev = it->second;
    }
    if (!(next->second > prev)) {
      std::ostringstream s;
      s << g.describe() << " ordering violated between k=" << k << " and k+1";
      rep.fail(s.str());
    }
  }

  const std::size_t start = static_cast<std::size_t>(
      std::floor((1.0 - tail_fraction) * static_cast<double>(table.size())));
  for (std::size_t i = start; i < table.size(); ++i) {
    const ZeroEntry& e = table[i];
    int k = e.family.k;
    int q = e.family.q;
    if (e.family.series == S::MainB) {
      q = f - q;  // continues the q-index past p
    } else if (e.family.series != S::MainA) {
      continue;
    }
    if (k < 1) continue;
    ++rep.checked;
    const double predicted = f * (k + 0.5) - q;
    const double err = std::abs(e.lambda - predicted);
    if (!(err <= 2.0 / k)) {
      std::ostringstream s;
      s << g.describe() << " spacing law violated at " << e.family.tag()
        << ": |lambda - prediction| = " << err << " > 2/k";
      rep.fail(s.str());
    }
  }
  return rep;
}

struct SineTypeReport {
  double H = 0.0;
  double x_max = 0.0;
  std::size_t samples = 0;
  // Bounds of |Z(z)| exp(-pi |Im z|): upper over the whole sampled strip,
  // lower on the boundary lines Im z = +-H.
  double A_est = 0.0;
  double B_est = 0.0;
  // Lower bound over the strip with discs of radius c/4 around zeros removed.
  double delta_est = 0.0;
  double separation = 0.0;
  bool skipped = false;
  std::string note;

  bool passed() const {
    return skipped || (B_est > 0.0 && delta_est > 0.0 && A_est >= B_est);
  }
};

inline SineTypeReport verify_sine_type(const GenFn& g, double H,
                                       std::size_t n_samples = 2000,
                                       double x_max = 40.0,
                                       std::size_t n_lines = 13) {
  if (!(H > 0.0)) throw DomainError("strip half-width H must be positive");
  if (n_samples < 2 || n_lines < 2) throw DomainError("too few samples");
  SineTypeReport rep;
  rep.H = H;
  rep.x_max = x_max;
  if (!g.is_entire()) {
    rep.skipped = true;
    rep.note = g.describe() + " is not single-valued off the real axis";
    return rep;
  }
  const ZeroTable zeros = zeros_up_to(g, x_max + 2.0);
  rep.separation = zeros.separation();
  const double eps = zeros.separation() / 4.0;
  std::vector<double> zero_points;
  for (const auto& e : zeros) {
    zero_points.push_back(e.lambda);
    zero_points.push_back(-e.lambda);
  }
  std::sort(zero_points.begin(), zero_points.end());
  auto near_zero = [&](std::complex<double> z) {
    auto it = std::lower_bound(zero_points.begin(), zero_points.end(), z.real());
    for (auto cand : {it, it == zero_points.begin() ? it : it - 1}) {
      if (cand != zero_points.end() && std::abs(z - *cand) < eps) return true;
    }
    return false;
  };

  const double pi = std::numbers::pi;
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  double delta = std::numeric_limits<double>::infinity();
  std::vector<double> lines;
  for (std::size_t j = 0; j < n_lines; ++j) {
    lines.push_back(-H + 2.0 * H * j / static_cast<double>(n_lines - 1));
  }
  if (n_lines % 2 == 0) lines.push_back(0.0);
  for (double y : lines) {
    const bool boundary = std::abs(std::abs(y) - H) < 1e-12;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double x =
          -x_max + 2.0 * x_max * i / static_cast<double>(n_samples - 1);
      const std::complex<double> z(x, y);
      const double v = std::abs(g.eval_complex(z)) * std::exp(-pi * std::abs(y));
      ++rep.samples;
      if (!std::isfinite(v)) {
        delta = 0.0;
        b = 0.0;
        continue;
      }
      a = std::max(a, v);
      if (boundary) b = std::min(b, v);
      if (!near_zero(z)) delta = std::min(delta, v);
    }
  }
  rep.A_est = a;
  rep.B_est = b;
  rep.delta_est = delta;
  return rep;
}

/// Sign changes of eval on (0, upper], refined by bisection, matched
/// one-to-one against the closed-form table within `tol`.
inline std::vector<double> bisection_zeros(const GenFn& g, double upper,
                                           double step = 1e-3) {
  std::vector<double> roots;
  double a = step * 1e-3;
  double fa = g.eval(a);
  const long count = std::lround(upper / step);
  for (long i = 1; i <= count; ++i) {
    const double b = std::min(upper, step * static_cast<double>(i));
    const double fb = g.eval(b);
    if (fb == 0.0) {
      roots.push_back(b);
    } else if (fa != 0.0 && std::signbit(fa) != std::signbit(fb)) {
      double lo = a;
      double hi = b;
      double flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g.eval(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

inline ValidationReport check_enumeration_completeness(const GenFn& g,
                                                       double upper = 30.0,
                                                       double tol = 1e-9) {
  ValidationReport rep;
  const ZeroTable table = zeros_up_to(g, upper);
  const std::vector<double> scanned = bisection_zeros(g, upper);
  std::ostringstream s;
  if (scanned.size() != table.size()) {
    s << g.describe() << ": bisection found " << scanned.size()
      << " zeros on (0, " << upper << "], closed form lists " << table.size();
    rep.fail(s.str());
  }
  const std::size_t n = std::min(scanned.size(), table.size());
  for (std::size_t i = 0; i < n; ++i) {
    ++rep.checked;
    const double d = std::abs(scanned[i] - table[i].lambda);
    if (!(d <= tol)) {
      std::ostringstream m;
      m.precision(15);
      m << g.describe() << ": zero #" << i << " closed form "
        << table[i].lambda << " vs bisection " << scanned[i];
      rep.fail(m.str());
    }
  }
  return rep;
}

/// Compares stored derivatives with a Richardson-extrapolated central
/// difference of step h; entries with an infinite derivative are skipped.
inline ValidationReport check_derivatives(const ZeroTable& table, const GenFn& g,
                                          double h = 1e-5, double rel = 1e-7) {
  ValidationReport rep;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const ZeroEntry& e = table[i];
    if (!std::isfinite(e.dZ)) continue;
    ++rep.checked;
    const double x = e.lambda;
    const double d1 = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
    const double d2 = (g.eval(x + 2.0 * h) - g.eval(x - 2.0 * h)) / (4.0 * h);
    const double fd = (4.0 * d1 - d2) / 3.0;
    const double err = std::abs(fd - e.dZ) / std::abs(e.dZ);
    if (!(err <= rel)) {
      std::ostringstream m;
      m << g.describe() << " zero #" << i << " (" << e.family.tag()
        << "): derivative " << e.dZ << " vs finite difference " << fd
        << " (rel " << err << ")";
      rep.fail(m.str());
    }
  }
  return rep;
}

}  // namespace ctfpw
