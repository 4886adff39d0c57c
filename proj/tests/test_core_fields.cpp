#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ctfpw/core/fourier.hpp"
#include "ctfpw/core/geometry.hpp"
#include "ctfpw/core/grid.hpp"
#include "oracles.hpp"

using namespace ctfpw;

namespace {

double l2(std::span<const std::complex<double>> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

TEST(FresnelNumber, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(fresnel_number(2 * oracle::pi, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(fresnel_number(6 * oracle::pi, 1, 1), 3.0);
  EXPECT_DOUBLE_EQ(fresnel_number(2 * oracle::pi, 2, 1), 4.0);
}

TEST(FresnelNumber, RejectsNonPositiveInputs) {
  EXPECT_THROW(fresnel_number(0, 1, 1), DomainError);
  EXPECT_THROW(fresnel_number(1, -1, 1), DomainError);
  EXPECT_THROW(fresnel_number(1, 1, 0), DomainError);
  EXPECT_THROW(FresnelGeometry(1, 1, -2), DomainError);
}

TEST(FresnelGeometry, FresnelNumberIsDerivedFromParameters) {
  const FresnelGeometry g(6 * oracle::pi, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(g.fresnel_number(), 3.0);
  const auto h = FresnelGeometry::from_fresnel_number(5.0, 2.0, 3.0);
  EXPECT_NEAR(h.fresnel_number(), 5.0, 1e-14);
  EXPECT_DOUBLE_EQ(h.support_diameter(), 2.0);
  EXPECT_DOUBLE_EQ(h.to_normalized_length(1.0), 0.5);
  EXPECT_DOUBLE_EQ(h.to_normalized_frequency(1.0), 2.0);
}

TEST(ChooseOddFresnel, Examples) {
  auto a = choose_odd_fresnel(2.3);
  EXPECT_EQ(a.f_odd, 3);
  EXPECT_NEAR(a.scale, std::sqrt(3.0 / 2.3), 1e-15);
  EXPECT_NEAR(a.scale, 1.1421, 1e-4);

  auto b = choose_odd_fresnel(3.0);
  EXPECT_EQ(b.f_odd, 3);
  EXPECT_EQ(b.scale, 1.0);

  auto c = choose_odd_fresnel(3.0001);
  EXPECT_EQ(c.f_odd, 5);
  EXPECT_NEAR(c.scale, std::sqrt(5.0 / 3.0001), 1e-15);

  auto d = choose_odd_fresnel(4.0);
  EXPECT_EQ(d.f_odd, 5);
  EXPECT_THROW(choose_odd_fresnel(0.0), DomainError);
}

TEST(ChooseOddFresnel, ScaledDiameterGivesOddNumber) {
  for (double f : {0.3, 1.7, 2.0, 6.5, 10.01}) {
    const auto o = choose_odd_fresnel(f);
    const FresnelGeometry g(2 * oracle::pi * f, 1.0, 1.0);
    const FresnelGeometry scaled(g.wavenumber(), g.support_diameter() * o.scale,
                                 g.distance());
    EXPECT_NEAR(scaled.fresnel_number(), o.f_odd, 1e-12);
    EXPECT_EQ(o.f_odd % 2, 1);
  }
}

TEST(Grid2D, CoordinatesAndDualFrequencies) {
  const Grid2D g(8, 2.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_DOUBLE_EQ(g.coord(0), -1.0);
  EXPECT_DOUBLE_EQ(g.coord(4), 0.0);
  EXPECT_DOUBLE_EQ(g.freq_spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.freq(0), -2.0);
  EXPECT_DOUBLE_EQ(g.freq(7), 1.5);
  EXPECT_THROW(Grid2D(7, 1.0), DomainError);
  EXPECT_THROW(Grid2D(8, 0.0), DomainError);
}

TEST(Field2D, RejectsWrongCountAndNonFinite) {
  const Grid2D g(4, 1.0);
  EXPECT_THROW(RealField2D(g, std::vector<double>(15)), ContractError);
  std::vector<double> v(16, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(RealField2D(g, v), DomainError);
}

TEST(Direction, UnitVector) {
  for (int d = 0; d < 64; ++d) {
    const auto u = Direction::uniform(d, 64).unit();
    EXPECT_NEAR(u.norm(), 1.0, 1e-15);
  }
  EXPECT_THROW(Direction(oracle::pi), DomainError);
  EXPECT_THROW(Direction(-0.1), DomainError);
}

TEST(Fft2, ConstantFieldGivesDcValue) {
  const Grid2D g(16, 3.0);
  RealField2D c(g);
  for (auto& v : c.values()) v = 2.5;
  const auto s = fft2_forward(c);
  EXPECT_NEAR(std::abs(s(8, 8) - std::complex<double>(2.5 * 9.0)), 0.0, 1e-12);
  double rest = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (i != 8 || j != 8) rest = std::max(rest, std::abs(s(i, j)));
  EXPECT_LT(rest, 1e-12);
}

TEST(Fft2, RoundTripRandomField) {
  auto r = oracle::rng(7);
  const Grid2D g(32, 2.0);
  ComplexField2D f(g);
  std::normal_distribution<double> d;
  for (auto& v : f.values()) v = {d(r), d(r)};
  const auto back = fft2_inverse(fft2_forward(f));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
  EXPECT_LT(err / l2(f.values()), 1e-12);
}

TEST(Fft2, GaussianTransformPair) {
  const double s = 0.3;
  const Grid2D g(128, 4.0);
  RealField2D f(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) f(i, j) = oracle::gaussian(g.point(i, j), s);
  const auto spec = fft2_forward(f);
  double err = 0.0;
  for (int m1 = 0; m1 < g.n(); ++m1)
    for (int m2 = 0; m2 < g.n(); ++m2)
      err = std::max(err, std::abs(spec(m1, m2) -
                                   oracle::gaussian_ft(g.freq_point(m1, m2), s)));
  EXPECT_LT(err, 1e-12);
}

TEST(Fft2, MatchesDirectSumOracle) {
  auto r = oracle::rng(11);
  const Grid2D g(12, 1.5);
  const auto f = oracle::random_field(g, r);
  std::vector<std::complex<double>> v(f.values().begin(), f.values().end());
  const auto spec = fft2_forward(f);
  for (int m1 : {0, 3, 6, 11}) {
    for (int m2 : {0, 5, 6, 9}) {
      const auto want = oracle::direct_dft(g, v, g.freq_point(m1, m2));
      EXPECT_LT(std::abs(spec(m1, m2) - want), 1e-12);
    }
  }
}

TEST(Fft2, Parseval) {
  auto r = oracle::rng(3);
  const Grid2D g(64, 2.0);
  const auto f = oracle::random_field(g, r);
  const auto spec = fft2_forward(f);
  double lhs = 0.0;
  for (double v : f.values()) lhs += v * v;
  lhs *= g.spacing() * g.spacing();
  double rhs = 0.0;
  for (const auto& v : spec.values()) rhs += std::norm(v);
  rhs *= g.freq_spacing() * g.freq_spacing();
  EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
}

TEST(Nudft, ConstantFieldAtOrigin) {
  const Grid2D g(10, 2.0);
  RealField2D c(g);
  for (auto& v : c.values()) v = -1.25;
  EXPECT_NEAR(std::abs(nudft_at(c, Vec2{0, 0}) - std::complex<double>(-1.25 * 4.0)),
              0.0, 1e-13);
}

TEST(Nudft, SingleSampleIsPlaneWave) {
  const Grid2D g(16, 2.0);
  RealField2D f(g);
  f(3, 11) = 0.7;
  const Vec2 y0 = g.point(3, 11);
  for (Vec2 eta : {Vec2{0.3, -1.7}, Vec2{4.21, 2.5}, Vec2{-9.9, 0.01}}) {
    const auto want = 0.7 * g.spacing() * g.spacing() *
                      std::polar(1.0, -2 * oracle::pi * y0.dot(eta));
    EXPECT_LT(std::abs(nudft_at(f, eta) - want), 1e-15);
  }
}

TEST(Nudft, AgreesWithFftAtGridFrequencies) {
  auto r = oracle::rng(5);
  const Grid2D g(32, 2.0);
  const auto f = oracle::random_field(g, r);
  const auto spec = fft2_forward(f);
  std::vector<Vec2> pts;
  std::vector<std::complex<double>> want;
  for (int m1 = 0; m1 < g.n(); m1 += 3)
    for (int m2 = 0; m2 < g.n(); m2 += 5) {
      pts.push_back(g.freq_point(m1, m2));
      want.push_back(spec(m1, m2));
    }
  const auto got = nudft_at(f, std::span<const Vec2>(pts), 2);
  const double scale = l2(spec.values());
  for (std::size_t i = 0; i < pts.size(); ++i)
    EXPECT_LT(std::abs(got[i] - want[i]), 1e-10 * scale);
}

TEST(Nudft, LinearAndConjugateSymmetric) {
  auto r = oracle::rng(9);
  const Grid2D g(20, 2.0);
  const auto a = oracle::random_field(g, r);
  const auto b = oracle::random_field(g, r);
  RealField2D c(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    c.values()[i] = 2.0 * a.values()[i] - 0.5 * b.values()[i];
  std::uniform_real_distribution<double> u(-6, 6);
  for (int k = 0; k < 20; ++k) {
    const Vec2 eta{u(r), u(r)};
    const auto va = nudft_at(a, eta);
    const auto vb = nudft_at(b, eta);
    EXPECT_LT(std::abs(nudft_at(c, eta) - (2.0 * va - 0.5 * vb)), 1e-13);
    EXPECT_LT(std::abs(nudft_at(a, -eta) - std::conj(va)), 1e-13);
  }
}

TEST(Nudft, ThreadCountDoesNotChangeBits) {
  auto r = oracle::rng(13);
  const Grid2D g(24, 2.0);
  const auto f = oracle::random_field(g, r);
  std::vector<Vec2> pts;
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 37; ++k) pts.push_back({u(r), u(r)});
  const auto s1 = nudft_at(f, std::span<const Vec2>(pts), 1);
  const auto s4 = nudft_at(f, std::span<const Vec2>(pts), 4);
  EXPECT_EQ(s1, s4);
}
