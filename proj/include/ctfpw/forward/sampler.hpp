#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctfpw/core/fourier.hpp"
#include "ctfpw/core/grid.hpp"
#include "ctfpw/core/parallel.hpp"
#include "ctfpw/forward/ctf.hpp"
#include "ctfpw/forward/phantom.hpp"

namespace ctfpw {

/// Source of CTF data eta -> Psi^(eta). Implementations are immutable and
/// safe to query from several threads.
class CtfSampler {
 public:
  virtual ~CtfSampler() = default;

  virtual std::vector<std::complex<double>> sample(
      std::span<const Vec2> points, unsigned threads) const = 0;

  std::complex<double> operator()(Vec2 eta) const {
    const Vec2 p[1] = {eta};
    return sample(std::span<const Vec2>(p), 1)[0];
  }

  virtual std::string name() const = 0;
  virtual double fresnel() const = 0;
};

/// Exact data from a phantom's closed-form spectra.
class AnalyticSampler final : public CtfSampler {
 public:
  AnalyticSampler(Phantom phantom, double f) : phantom_(std::move(phantom)), f_(f) {
    phantom_.validate();
    if (!(f > 0.0)) throw DomainError("Fresnel number must be positive");
  }

  std::vector<std::complex<double>> sample(std::span<const Vec2> points,
                                           unsigned threads) const override {
    std::vector<std::complex<double>> out(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
      const auto [m, p] = phantom_spectrum(phantom_, points[i]);
      out[i] = ctf_transfer(f_, points[i], m, p);
    });
    return out;
  }

  std::string name() const override { return "analytic"; }
  double fresnel() const override { return f_; }
  const Phantom& phantom() const { return phantom_; }

 private:
  Phantom phantom_;
  double f_;
};

/// Direct-sum transform of the hologram's CTF data (I - 1) / 2.
class HologramSampler final : public CtfSampler {
 public:
  explicit HologramSampler(const Hologram& h)
      : data_(ctf_data(h)), f_(h.fresnel()) {}

  std::vector<std::complex<double>> sample(std::span<const Vec2> points,
                                           unsigned threads) const override {
    return nudft_at(data_, points, threads);
  }

  std::string name() const override { return "hologram"; }
  double fresnel() const override { return f_; }
  const RealField2D& data() const { return data_; }

 private:
  RealField2D data_;
  double f_;
};

/// Data expressed in coordinates stretched by `scale` (y' = y / scale):
/// Psi'^(eta') = scale^-2 Psi^(eta' / scale), at Fresnel number
/// scale^2 times that of the inner sampler.
class ScaledSampler final : public CtfSampler {
 public:
  ScaledSampler(std::shared_ptr<const CtfSampler> inner, double scale)
      : inner_(std::move(inner)), scale_(scale) {
    if (!inner_) throw ContractError("ScaledSampler needs an inner sampler");
    if (!(scale > 0.0)) throw DomainError("scale must be positive");
  }

  std::vector<std::complex<double>> sample(std::span<const Vec2> points,
                                           unsigned threads) const override {
    std::vector<Vec2> inner_points(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      inner_points[i] = points[i] * (1.0 / scale_);
    }
    auto out = inner_->sample(inner_points, threads);
    const double w = 1.0 / (scale_ * scale_);
    for (auto& v : out) v *= w;
    return out;
  }

  std::string name() const override { return inner_->name() + "+scaled"; }
  double fresnel() const override { return inner_->fresnel() * scale_ * scale_; }
  double scale() const { return scale_; }

 private:
  std::shared_ptr<const CtfSampler> inner_;
  double scale_;
};

}  // namespace ctfpw
