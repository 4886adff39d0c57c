#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ctfpw/core/error.hpp"
#include "ctfpw/genfn/genfn.hpp"

namespace ctfpw {

/// Which closed-form series a zero came from.
struct ZeroFamily {
  enum class Series {
    MainA,       // zero of cos((pi/f)(s_q + q)), k >= 0
    MainB,       // zero of cos((pi/f)(s_q + f - q)), k >= 1
    Merged,      // the common zero of all leading cosines, kept once
    Correction,  // root of the correction numerator
    Explicit,    // closed-form list of the f = 2 and f = 4 functions
  };
  Series series = Series::MainA;
  int k = 0;
  int q = 0;

  std::string tag() const {
    std::ostringstream s;
    switch (series) {
      case Series::MainA: s << "A:k=" << k << ":q=" << q; break;
      case Series::MainB: s << "B:k=" << k << ":q=" << q; break;
      case Series::Merged: s << "M"; break;
      case Series::Correction: s << "C:q=" << q; break;
      case Series::Explicit: s << "E" << q << ":k=" << k; break;
    }
    return s.str();
  }
};

struct ZeroEntry {
  double lambda = 0.0;
  double lambda_sq = 0.0;  // exact f (l + 1/2) or f l
  std::int64_t l = 0;
  double dZ = 0.0;
  ZeroFamily family;
};

class ZeroTable {
 public:
  ZeroTable() = default;

  /// Sorts, rejects coincident zeros and records the separation constant.
  static ZeroTable from_entries(GenFnKind kind, int f,
                                std::vector<ZeroEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const ZeroEntry& a, const ZeroEntry& b) {
                return a.lambda < b.lambda;
              });
    ZeroTable t;
    t.kind_ = kind;
    t.f_ = f;
    double c = std::numeric_limits<double>::infinity();
    if (!entries.empty()) c = 2.0 * entries.front().lambda;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      const double gap = entries[i].lambda - entries[i - 1].lambda;
      if (gap < 1e-9) {
        std::ostringstream msg;
        msg << "coincident zeros at lambda=" << entries[i].lambda << " ("
            << entries[i - 1].family.tag() << " and "
            << entries[i].family.tag() << ")";
        throw ConstructionError(msg.str());
      }
      c = std::min(c, gap);
    }
    if (!entries.empty() && !(c > 0.0)) {
      throw ConstructionError("zero table contains lambda = 0");
    }
    t.separation_ = c;
    t.entries_ = std::move(entries);
    return t;
  }

  GenFnKind kind() const { return kind_; }
  int fresnel() const { return f_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const ZeroEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<ZeroEntry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  double separation() const { return separation_; }
  double radius() const { return entries_.empty() ? 0.0 : entries_.back().lambda; }

  /// First `n` entries (all when n exceeds the size).
  ZeroTable truncated(std::size_t n) const {
    ZeroTable t = *this;
    if (n < t.entries_.size()) t.entries_.resize(n);
    return t;
  }

  /// Unchecked mutable access, used to inject faults in negative tests.
  std::vector<ZeroEntry>& mutable_entries_for_testing() { return entries_; }

  void write_csv(std::ostream& os) const {
    os << "lambda,lambda_sq,l,dZ,family\n";
    os.precision(17);
    for (const auto& e : entries_) {
      os << e.lambda << ',' << e.lambda_sq << ',' << e.l << ',' << e.dZ << ','
         << e.family.tag() << '\n';
    }
  }

 private:
  GenFnKind kind_ = GenFnKind::Phase;
  int f_ = 1;
  double separation_ = 0.0;
  std::vector<ZeroEntry> entries_;
};

namespace detail {

inline double zero_lambda_sq(GenFnKind kind, int f, std::int64_t l) {
  return kind == GenFnKind::Phase ? f * (static_cast<double>(l) + 0.5)
                                  : f * static_cast<double>(l);
}

// Every closed-form zero with lambda^2 <= lambda_sq_max, without dZ.
inline std::vector<ZeroEntry> enumerate_zeros(const GenFn& g,
                                              double lambda_sq_max) {
  const GenFnKind kind = g.kind();
  const int f = g.fresnel();
  std::vector<ZeroEntry> out;
  auto push = [&](std::int64_t l, ZeroFamily fam) {
    const double lsq = zero_lambda_sq(kind, f, l);
    if (lsq > lambda_sq_max || lsq <= 0.0) return false;
    out.push_back({std::sqrt(lsq), lsq, l, 0.0, fam});
    return true;
  };
  using S = ZeroFamily::Series;

  if (f % 2 == 1) {
    const int p = g.half_order();
    const std::int64_t fl = f;
    for (int q = 0; q <= p; ++q) {
      for (std::int64_t k = 1;; ++k) {
        const std::int64_t l = fl * k * k + (fl - 2 * q) * k;
        if (!push(l, {S::MainA, static_cast<int>(k), q})) break;
      }
    }
    for (int q = 1; q <= p; ++q) {
      for (std::int64_t k = 1;; ++k) {
        const std::int64_t l = fl * k * k - (fl - 2 * q) * k;
        if (!push(l, {S::MainB, static_cast<int>(k), q})) break;
      }
    }
    if (kind == GenFnKind::Phase) {
      push(0, {S::Merged, 0, 0});
      for (int q = 1; q <= p; ++q) push(2 * q - 1, {S::Correction, 0, q});
    } else {
      for (int q = 0; q <= p; ++q) push(2 * q + 1, {S::Correction, 0, q});
    }
    return out;
  }
  if (f == 2) {
    for (std::int64_t k = 0;; ++k) {
      if (!push((k * k + k) / 2, {S::Explicit, static_cast<int>(k), 0})) break;
    }
    return out;
  }
  // f == 4: alpha_k (k >= 1), beta_k (k >= 0) and the correction root 14.
  for (std::int64_t k = 1;; ++k) {
    if (!push(k * k, {S::Explicit, static_cast<int>(k), 1})) break;
  }
  for (std::int64_t k = 0;; ++k) {
    if (!push(k * k + k, {S::Explicit, static_cast<int>(k), 2})) break;
  }
  push(3, {S::Correction, 0, 1});
  return out;
}

}  // namespace detail

/// All zeros with lambda <= radius_max plus `extra` further zeros, each with
/// its derivative. Throws ConstructionError on coincident zeros and
/// DegenerateZeroError on a vanishing derivative.
inline ZeroTable zeros_up_to(const GenFn& g, double radius_max,
                             std::size_t extra = 0) {
  if (!(radius_max >= 0.0) || !std::isfinite(radius_max)) {
    throw DomainError("radius_max must be finite and nonnegative");
  }
  // Zeros are roughly one per unit of lambda, so this bound is quickly met.
  double reach = radius_max + static_cast<double>(extra) + g.fresnel() + 2.0;
  std::vector<ZeroEntry> all;
  for (;;) {
    all = detail::enumerate_zeros(g, reach * reach);
    std::size_t beyond = 0;
    for (const auto& e : all) beyond += e.lambda > radius_max ? 1 : 0;
    if (beyond >= extra) break;
    reach *= 1.5;
  }
  std::sort(all.begin(), all.end(), [](const ZeroEntry& a, const ZeroEntry& b) {
    return a.lambda < b.lambda;
  });
  std::size_t keep = 0;
  while (keep < all.size() && all[keep].lambda <= radius_max) ++keep;
  keep = std::min(all.size(), keep + extra);
  // Duplicates are detected before anything is dropped.
  ZeroTable checked = ZeroTable::from_entries(g.kind(), g.fresnel(), all);
  std::vector<ZeroEntry> entries(checked.begin(), checked.begin() + keep);
  for (auto& e : entries) e.dZ = g.derivative_at(e.lambda);
  return ZeroTable::from_entries(g.kind(), g.fresnel(), std::move(entries));
}

/// The first `count` positive zeros.
inline ZeroTable first_zeros(const GenFn& g, std::size_t count) {
  return zeros_up_to(g, 0.0, count);
}

}  // namespace ctfpw
