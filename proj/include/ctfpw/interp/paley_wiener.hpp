#pragma once

// Lagrange-type interpolation in the Paley-Wiener space from samples at the
// zeros of a sine-type function Z:
//
//   g(t) = sum_lambda Z(t) g(lambda) / ((t - lambda) Z'(lambda)).
//
// For even Z the zeros come in pairs +-lambda with Z'(-lambda) = -Z'(lambda),
// and the sum is taken over lambda > 0 with paired terms.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctfpw/core/error.hpp"
#include "ctfpw/genfn/genfn.hpp"
#include "ctfpw/genfn/zero_table.hpp"

namespace ctfpw {

struct InterpConfig {
  // Number of positive zeros used; nullopt uses the whole table.
  std::optional<std::size_t> n_terms;
  // Relative distance below which t is treated as sitting on a zero.
  double near_zero_eps = 1e-8;

  void validate() const {
    if (n_terms && *n_terms < 1) throw ContractError("n_terms must be >= 1");
    if (!(near_zero_eps > 0.0 && near_zero_eps < 1e-3)) {
      throw ContractError("near_zero_eps must lie in (0, 1e-3)");
    }
  }
};

/// Samples g(+lambda_i) and g(-lambda_i) aligned with a zero table.
struct SampleSet {
  std::vector<std::complex<double>> values_pos;
  std::vector<std::complex<double>> values_neg;

  std::size_t size() const { return values_pos.size(); }

  void check_against(const ZeroTable& table) const {
    if (values_pos.size() != table.size() || values_neg.size() != table.size()) {
      throw ContractError("sample set is not aligned with the zero table");
    }
    for (std::size_t i = 0; i < values_pos.size(); ++i) {
      if (!std::isfinite(values_pos[i].real()) ||
          !std::isfinite(values_pos[i].imag()) ||
          !std::isfinite(values_neg[i].real()) ||
          !std::isfinite(values_neg[i].imag())) {
        throw ContractError("sample set contains non-finite values");
      }
    }
  }
};

/// One interpolation node: position, derivative of Z there, sample value.
struct CardinalNode {
  double x;
  double dZ;
  std::complex<double> value;
};

/// Truncated cardinal series over an arbitrary node list, in list order.
///
/// `z_at_t` is Z(t). When t lies within eps * max(1, |t|) of a node, that
/// node contributes its value and Z(t) in the remaining terms is replaced by
/// its linearization dZ (t - x) about the node.
template <class NodeAt>
std::complex<double> cardinal_series(std::size_t count, NodeAt&& node_at,
                                     double t, double z_at_t,
                                     double near_zero_eps) {
  const double tol = near_zero_eps * std::max(1.0, std::abs(t));
  std::size_t hit = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(t - node_at(i).x) < tol) {
      hit = i;
      break;
    }
  }
  double z = z_at_t;
  if (hit < count) {
    const CardinalNode n = node_at(hit);
    z = n.dZ * (t - n.x);
  }
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const CardinalNode n = node_at(i);
    if (i == hit) {
      acc += n.value;
    } else {
      acc += n.value * (z / ((t - n.x) * n.dZ));
    }
  }
  return acc;
}

namespace detail {

inline std::size_t terms_used(const ZeroTable& table, const InterpConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_terms.value_or(table.size());
  if (n > table.size()) {
    throw TruncationDomainError("n_terms exceeds the zero table length");
  }
  return n;
}

}  // namespace detail

/// Series over +-lambda for the first n_terms zeros, summed node by node.
inline std::complex<double> interpolate(const ZeroTable& table, const GenFn& z,
                                        const SampleSet& samples, double t,
                                        const InterpConfig& cfg = {}) {
  samples.check_against(table);
  if (!std::isfinite(t)) throw ContractError("t must be finite");
  const std::size_t n = detail::terms_used(table, cfg);
  auto node = [&](std::size_t i) -> CardinalNode {
    const ZeroEntry& e = table[i / 2];
    if (i % 2 == 0) return {e.lambda, e.dZ, samples.values_pos[i / 2]};
    return {-e.lambda, -e.dZ, samples.values_neg[i / 2]};
  };
  return cardinal_series(2 * n, node, t, z.eval(t), cfg.near_zero_eps);
}

/// Paired form for even Z with Z(0) != 0:
///   Z(t) sum_{lambda > 0} [g(lambda) / (t - lambda) - g(-lambda) / (t + lambda)] / Z'(lambda).
inline std::complex<double> interpolate_even(const ZeroTable& table,
                                             const GenFn& z,
                                             const SampleSet& samples,
                                             double t,
                                             const InterpConfig& cfg = {}) {
  samples.check_against(table);
  if (!std::isfinite(t)) throw ContractError("t must be finite");
  if (z.eval(0.0) == 0.0) {
    throw ContractError(z.describe() + " vanishes at 0; the paired form needs Z(0) != 0");
  }
  const std::size_t n = detail::terms_used(table, cfg);
  const double tol = cfg.near_zero_eps * std::max(1.0, std::abs(t));

  double zt = 0.0;
  std::size_t hit = n;
  bool hit_negative = false;
  for (std::size_t i = 0; i < n && hit == n; ++i) {
    if (std::abs(t - table[i].lambda) < tol) {
      hit = i;
    } else if (std::abs(t + table[i].lambda) < tol) {
      hit = i;
      hit_negative = true;
    }
  }
  if (hit < n) {
    const ZeroEntry& e = table[hit];
    zt = hit_negative ? -e.dZ * (t + e.lambda) : e.dZ * (t - e.lambda);
  } else {
    zt = z.eval(t);
  }

  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ZeroEntry& e = table[i];
    const std::complex<double>& gp = samples.values_pos[i];
    const std::complex<double>& gm = samples.values_neg[i];
    if (i == hit) {
      if (hit_negative) {
        acc += gm + gp * (zt / ((t - e.lambda) * e.dZ));
      } else {
        acc += gp - gm * (zt / ((t + e.lambda) * e.dZ));
      }
      continue;
    }
    acc += (zt / e.dZ) * (gp / (t - e.lambda) - gm / (t + e.lambda));
  }
  return acc;
}

/// Table radius needed to interpolate on |t| <= t_max with a given margin.
inline double required_table_radius(double t_max, double margin = 2.0) {
  if (!(margin >= 1.0)) throw ContractError("zero margin must be >= 1");
  return margin * t_max;
}

}  // namespace ctfpw
