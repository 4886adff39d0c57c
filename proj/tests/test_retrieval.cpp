#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "ctfpw/forward/sampler.hpp"
#include "ctfpw/retrieval/retrieval.hpp"
#include "oracles.hpp"

using namespace ctfpw;
using cplx = std::complex<double>;

namespace {

Phantom phi_rect() { return Phantom::rect({0.25, 0.25}, 0.0, 0.01); }
Phantom mu_rect() { return Phantom::rect({0.25, 0.25}, 0.01, 0.0); }

// Multiplies another sampler's data by a complex constant.
class WeightedSampler final : public CtfSampler {
 public:
  WeightedSampler(const CtfSampler& inner, double w) : inner_(inner), w_(w) {}
  std::vector<cplx> sample(std::span<const Vec2> pts, unsigned threads) const override {
    auto v = inner_.sample(pts, threads);
    for (auto& x : v) x *= w_;
    return v;
  }
  std::string name() const override { return "weighted"; }
  double fresnel() const override { return inner_.fresnel(); }

 private:
  const CtfSampler& inner_;
  double w_;
};

ReconResult run(const Phantom& p, Channel ch, double f, ReconConfig cfg = {}) {
  const AnalyticSampler s(p, f);
  const auto truth = analytic_truth(p, ch, cfg.output);
  return reconstruct_field(s, ch, cfg, &truth);
}

}  // namespace

TEST(Channels, KindMapping) {
  EXPECT_EQ(genfn_kind_for(Channel::Sin), GenFnKind::Phase);
  EXPECT_EQ(genfn_kind_for(Channel::Cos), GenFnKind::Attenuation);
  EXPECT_EQ(parse_channel("cos"), Channel::Cos);
  EXPECT_THROW(parse_channel("tan"), std::exception);
}

TEST(NearestDirection, MapsNodesOntoSignedRays) {
  const double r = 2.0;
  for (int d = 0; d < 16; ++d) {
    const double a = d * oracle::pi / 16;
    const auto [d1, t1] = detail::nearest_direction({r * std::cos(a), r * std::sin(a)}, 16);
    EXPECT_EQ(d1, d);
    EXPECT_NEAR(t1, r, 1e-14);
    const auto [d2, t2] =
        detail::nearest_direction({-r * std::cos(a), -r * std::sin(a)}, 16);
    EXPECT_EQ(d2, d);
    EXPECT_NEAR(t2, -r, 1e-14);
  }
  const auto [d0, t0] = detail::nearest_direction({0.0, 0.0}, 16);
  EXPECT_EQ(d0, 0);
  EXPECT_EQ(t0, 0.0);
}

TEST(Ray, ZeroSamplerGivesZero) {
  const AnalyticSampler s(Phantom{}, 3.0);
  const auto g = GenFn::build(GenFnKind::Phase, 3);
  const auto table = first_zeros(g, 40);
  EXPECT_EQ(reconstruct_spectrum_on_ray(s, g, table, Direction(0.3), 1.1, {}), cplx(0.0));
}

TEST(Ray, SampleConsistencyAtEveryZero) {
  const AnalyticSampler s(phi_rect(), 3.0);
  for (const auto kind : {GenFnKind::Phase, GenFnKind::Attenuation}) {
    const auto g = GenFn::build(kind, 3);
    const auto table = first_zeros(g, 60);
    for (int d : {0, 5, 11}) {
      const auto theta = Direction::uniform(d, 16);
      const auto samples = ray_samples(s, table, theta.unit());
      for (std::size_t i = 0; i < table.size() / 2; ++i) {
        const double sign = table[i].l % 2 == 0 ? 1.0 : -1.0;
        const cplx want = sign * s(theta.unit() * table[i].lambda);
        const cplx got = interpolate_even(table, g, samples, table[i].lambda);
        EXPECT_EQ(got, want);
      }
    }
  }
}

TEST(Ray, SpectrumAtInteriorPointMatchesClosedForm) {
  const Phantom p = phi_rect();
  const AnalyticSampler s(p, 3.0);
  const auto g = GenFn::build(GenFnKind::Phase, 3);
  ReconConfig cfg;
  const auto table = zeros_up_to(g, 128.0, 1);
  const cplx got = reconstruct_spectrum_on_ray(s, g, table, Direction(0.0), 0.7, cfg);
  const auto [mu, phi] = phantom_spectrum(p, Vec2{0.7, 0.0});
  EXPECT_LT(std::abs(got - phi), 1e-3 * std::abs(phi));
  EXPECT_THROW(reconstruct_spectrum_on_ray(s, g, table, Direction(0.0),
                                           table.radius(), cfg),
               TruncationDomainError);
}

TEST(Ray, AttenuationChannelRecoversMuSpectrum) {
  const Phantom p = mu_rect();
  const AnalyticSampler s(p, 3.0);
  const auto g = GenFn::build(GenFnKind::Attenuation, 3);
  const auto table = zeros_up_to(g, 32.0, 1);
  for (double t : {0.0, 0.7, 2.9, -4.2}) {
    const cplx got = reconstruct_spectrum_on_ray(s, g, table, Direction(0.4), t, {});
    const auto [mu, phi] = phantom_spectrum(p, Direction(0.4).unit() * t);
    EXPECT_LT(std::abs(got - mu), 2e-3 * std::abs(p.components[0].mu) * 0.25) << t;
  }
}

TEST(Reconstruct, ZeroDataGiveZeroField) {
  const AnalyticSampler s(Phantom{}, 3.0);
  const auto r = reconstruct_field(s, Channel::Sin, {});
  for (double v : r.field.values()) EXPECT_EQ(v, 0.0);
}

TEST(Reconstruct, RectPhaseChannelAtFresnelThree) {
  const auto r = run(phi_rect(), Channel::Sin, 3.0);
  ASSERT_TRUE(r.report.rel_l2_error);
  EXPECT_LE(*r.report.rel_l2_error, 5e-2);
  EXPECT_NEAR(*r.report.rel_l2_error, 0.019972, 2e-3);
  EXPECT_LE(r.report.imag_residue, 1e-9);
  EXPECT_EQ(r.report.genfn, "Z_3");
  EXPECT_EQ(r.report.direction_residuals.size(), 64u);
}

TEST(Reconstruct, RectAttenuationChannelAtFresnelThree) {
  const auto r = run(mu_rect(), Channel::Cos, 3.0);
  ASSERT_TRUE(r.report.rel_l2_error);
  EXPECT_LE(*r.report.rel_l2_error, 5e-2);
  EXPECT_NEAR(*r.report.rel_l2_error, 0.019972, 2e-3);
  EXPECT_EQ(r.report.genfn, "W_3");
}

TEST(Reconstruct, ExplicitEvenFresnelNumbers) {
  const auto r = run(phi_rect(), Channel::Sin, 2.0);
  EXPECT_LE(*r.report.rel_l2_error, 5e-2);
  EXPECT_EQ(r.report.genfn, "Z_2");
  const AnalyticSampler s(mu_rect(), 2.0);
  EXPECT_THROW(reconstruct_field(s, Channel::Cos, {}), UnsupportedConfiguration);
}

TEST(Reconstruct, NonEntireFormIsRefused) {
  const Phantom p = phi_rect();
  auto s = std::make_shared<AnalyticSampler>(p, 4.0);
  EXPECT_THROW(reconstruct_field(*s, Channel::Sin, {}), UnsupportedConfiguration);
  ReconConfig cfg;
  const auto truth = analytic_truth(p, Channel::Sin, cfg.output);
  const auto r = reconstruct_field_refresnel(s, Channel::Sin, cfg, &truth);
  EXPECT_EQ(r.report.fresnel, 5);
  EXPECT_LE(*r.report.rel_l2_error, 5e-2);
}

TEST(Reconstruct, NonIntegralFresnelNeedsRefresnel) {
  const Phantom p = phi_rect();
  auto s = std::make_shared<AnalyticSampler>(p, 2.3);
  EXPECT_THROW(reconstruct_field(*s, Channel::Sin, {}), UnsupportedConfiguration);
  ReconConfig cfg;
  const auto truth = analytic_truth(p, Channel::Sin, cfg.output);
  const auto r = reconstruct_field_refresnel(s, Channel::Sin, cfg, &truth);
  EXPECT_EQ(r.report.fresnel, 3);
  EXPECT_NEAR(r.report.scale, std::sqrt(3.0 / 2.3), 1e-14);
  EXPECT_LE(*r.report.rel_l2_error, 5e-2);
  EXPECT_TRUE(r.field.grid() == cfg.output);
}

TEST(Reconstruct, LinearInData) {
  const AnalyticSampler s(phi_rect(), 3.0);
  const WeightedSampler w(s, -2.75);
  const auto a = reconstruct_field(s, Channel::Sin, {});
  const auto b = reconstruct_field(w, Channel::Sin, {});
  double peak = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.field.values().size(); ++i) {
    peak = std::max(peak, std::abs(a.field.values()[i]));
    err = std::max(err, std::abs(b.field.values()[i] + 2.75 * a.field.values()[i]));
  }
  EXPECT_LE(err, 1e-12 * 2.75 * peak);
}

TEST(Reconstruct, ConvergesWithTermsAndDirections) {
  const Phantom p = phi_rect();
  ReconConfig cfg;
  const auto base = run(p, Channel::Sin, 3.0, cfg);
  double prev = *base.report.rel_l2_error;
  std::size_t n = base.report.n_terms;
  int d = cfg.n_directions;
  for (int step = 0; step < 3; ++step) {
    n *= 2;
    d *= 2;
    cfg.n_terms = n;
    cfg.n_directions = d;
    const auto r = run(p, Channel::Sin, 3.0, cfg);
    EXPECT_LE(*r.report.rel_l2_error, 1.1 * prev) << "step " << step;
    prev = *r.report.rel_l2_error;
  }
}

TEST(Reconstruct, ThreadCountDoesNotChangeBits) {
  const AnalyticSampler s(phi_rect(), 5.0);
  ReconConfig serial;
  ReconConfig parallel;
  parallel.threads = 3;
  const auto a = reconstruct_field(s, Channel::Sin, serial);
  const auto b = reconstruct_field(s, Channel::Sin, parallel);
  ASSERT_EQ(a.field.values().size(), b.field.values().size());
  EXPECT_TRUE(std::equal(a.field.values().begin(), a.field.values().end(),
                         b.field.values().begin()));
}

TEST(Reconstruct, InsufficientTableIsRejected) {
  const AnalyticSampler s(phi_rect(), 3.0);
  ReconConfig cfg;
  cfg.n_terms = 10;
  EXPECT_THROW(reconstruct_field(s, Channel::Sin, cfg), TruncationDomainError);
  cfg.n_terms.reset();
  cfg.n_directions = 2;
  EXPECT_THROW(reconstruct_field(s, Channel::Sin, cfg), ContractError);
}

TEST(Reconstruct, ReportJson) {
  const auto r = run(phi_rect(), Channel::Sin, 1.0);
  const auto j = r.report.to_json();
  EXPECT_EQ(j["channel"], "sin");
  EXPECT_EQ(j["fresnel"], 1);
  EXPECT_EQ(j["grid"]["n"], 128);
  EXPECT_TRUE(j["metrics"].contains("rel_l2_error"));
  EXPECT_TRUE(j["timing"].contains("total_s"));
}

TEST(Leakage, SingleChannelPhantoms) {
  ReconConfig cfg;
  const auto a = channel_leakage_check(phi_rect(), 3.0, cfg);
  EXPECT_EQ(a.populated, Channel::Sin);
  EXPECT_LE(a.populated_rel_l2, 5e-2);
  EXPECT_LE(a.leakage, 5e-2);
  const auto b = channel_leakage_check(mu_rect(), 3.0, cfg);
  EXPECT_EQ(b.populated, Channel::Cos);
  EXPECT_LE(b.leakage, 5e-2);
  const auto z = channel_leakage_check(Phantom{}, 3.0, cfg);
  EXPECT_EQ(z.leakage, 0.0);
  EXPECT_THROW(channel_leakage_check(Phantom::rect({0.2, 0.2}, 0.01, 0.01), 3.0, cfg),
               ContractError);
}
