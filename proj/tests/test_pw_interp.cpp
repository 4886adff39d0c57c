#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ctfpw/genfn/genfn.hpp"
#include "ctfpw/genfn/zero_table.hpp"
#include "ctfpw/interp/paley_wiener.hpp"
#include "ctfpw/interp/wks.hpp"
#include "oracles.hpp"

using namespace ctfpw;
using cplx = std::complex<double>;

namespace {

SampleSet random_samples(std::size_t n, std::mt19937_64& r) {
  std::normal_distribution<double> d;
  SampleSet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.values_pos.emplace_back(d(r), d(r));
    s.values_neg.emplace_back(d(r), d(r));
  }
  return s;
}

// Spectrum supported in [-0.4, 0.4]: a squared sinc.
double band_limited(double t) {
  const double s = sinc(0.4 * t);
  return s * s;
}

SampleSet sample_function(const ZeroTable& table, double (*g)(double)) {
  SampleSet s;
  for (const auto& e : table) {
    s.values_pos.emplace_back(g(e.lambda));
    s.values_neg.emplace_back(g(-e.lambda));
  }
  return s;
}

}  // namespace

TEST(CardinalSeries, ShannonExampleAtQuarter) {
  const int n = 2000;
  auto g = [](double t) {
    return t == 0.0 ? 0.8 : std::sin(0.8 * oracle::pi * t) / (oracle::pi * t);
  };
  auto node = [&](std::size_t i) {
    const int k = static_cast<int>(i) - n;
    return CardinalNode{double(k), oracle::pi * ((k % 2 == 0) ? 1.0 : -1.0),
                        cplx(g(k))};
  };
  const double t = 0.25;
  const auto v = cardinal_series(2 * n + 1, node, t, std::sin(oracle::pi * t), 1e-8);
  EXPECT_NEAR(v.real(), 0.74841, 2e-3);
  EXPECT_NEAR(v.real(), g(t), 2e-3);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(Interpolate, ZeroSamplesGiveZero) {
  const auto g = GenFn::build(GenFnKind::Phase, 3);
  const auto table = first_zeros(g, 50);
  SampleSet s{std::vector<cplx>(50), std::vector<cplx>(50)};
  for (double t : {0.0, 0.3, 2.2, 7.5}) {
    EXPECT_EQ(interpolate(table, g, s, t), cplx(0.0));
    EXPECT_EQ(interpolate_even(table, g, s, t), cplx(0.0));
  }
}

TEST(Interpolate, MisalignedSamplesAreRejected) {
  const auto g = GenFn::build(GenFnKind::Phase, 1);
  const auto table = first_zeros(g, 10);
  SampleSet s{std::vector<cplx>(9), std::vector<cplx>(10)};
  EXPECT_THROW(interpolate(table, g, s, 0.5), ContractError);
  EXPECT_THROW(interpolate_even(table, g, s, 0.5), ContractError);
  SampleSet ok{std::vector<cplx>(10), std::vector<cplx>(10)};
  InterpConfig cfg;
  cfg.n_terms = 11;
  EXPECT_THROW(interpolate(table, g, ok, 0.5, cfg), TruncationDomainError);
  cfg.n_terms = 5;
  cfg.near_zero_eps = 0.1;
  EXPECT_THROW(interpolate(table, g, ok, 0.5, cfg), ContractError);
}

TEST(Interpolate, CardinalityOnRandomSuites) {
  auto r = oracle::rng(17);
  std::uniform_int_distribution<int> pick_f(0, 4);
  int cases = 0;
  for (; cases < 120; ++cases) {
    const int f = 2 * pick_f(r) + 1;
    const auto kind = (cases % 2 == 0) ? GenFnKind::Phase : GenFnKind::Attenuation;
    const auto g = GenFn::build(kind, f);
    const auto table = first_zeros(g, 60);
    const auto s = random_samples(table.size(), r);
    std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
    const std::size_t j = pick(r);
    EXPECT_EQ(interpolate(table, g, s, table[j].lambda), s.values_pos[j]);
    EXPECT_EQ(interpolate(table, g, s, -table[j].lambda), s.values_neg[j]);
    EXPECT_EQ(interpolate_even(table, g, s, table[j].lambda), s.values_pos[j]);
    EXPECT_EQ(interpolate_even(table, g, s, -table[j].lambda), s.values_neg[j]);
  }
  EXPECT_GE(cases, 100);
}

TEST(Interpolate, LinearityOnRandomSuites) {
  auto r = oracle::rng(23);
  std::normal_distribution<double> d;
  std::uniform_real_distribution<double> ut(-20, 20);
  for (int c = 0; c < 120; ++c) {
    const int f = 2 * (c % 5) + 1;
    const auto kind = (c % 2 == 0) ? GenFnKind::Phase : GenFnKind::Attenuation;
    const auto g = GenFn::build(kind, f);
    const auto table = first_zeros(g, 80);
    const auto s1 = random_samples(table.size(), r);
    const auto s2 = random_samples(table.size(), r);
    const cplx a(d(r), d(r)), b(d(r), d(r));
    SampleSet mix;
    for (std::size_t i = 0; i < table.size(); ++i) {
      mix.values_pos.push_back(a * s1.values_pos[i] + b * s2.values_pos[i]);
      mix.values_neg.push_back(a * s1.values_neg[i] + b * s2.values_neg[i]);
    }
    const double t = ut(r);
    const cplx v1 = interpolate(table, g, s1, t);
    const cplx v2 = interpolate(table, g, s2, t);
    const cplx vm = interpolate(table, g, mix, t);
    const double scale = std::abs(a * v1) + std::abs(b * v2) + 1e-300;
    EXPECT_LE(std::abs(vm - (a * v1 + b * v2)), 1e-12 * scale) << "case " << c;
  }
}

TEST(InterpolateEven, MatchesNodeByNodeSum) {
  auto r = oracle::rng(31);
  std::uniform_real_distribution<double> ut(-30, 30);
  for (int c = 0; c < 100; ++c) {
    const int f = 2 * (c % 4) + 1;
    const auto kind = (c % 3 == 0) ? GenFnKind::Attenuation : GenFnKind::Phase;
    const auto g = GenFn::build(kind, f);
    const auto table = first_zeros(g, 200);
    const auto s = random_samples(table.size(), r);
    const double t = ut(r);
    const cplx a = interpolate(table, g, s, t);
    const cplx b = interpolate_even(table, g, s, t);
    EXPECT_LE(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a))) << "case " << c;
  }
}

TEST(InterpolateEven, PhaseOneBandLimitedFunction) {
  const auto g = GenFn::build(GenFnKind::Phase, 1);
  const auto table = first_zeros(g, 400);
  const auto s = sample_function(table, band_limited);
  for (double t = -6; t <= 6; t += 0.37) {
    const cplx a = interpolate(table, g, s, t);
    const cplx b = interpolate_even(table, g, s, t);
    EXPECT_LE(std::abs(a - b), 1e-10);
    EXPECT_NEAR(b.real(), band_limited(t), 5e-3) << t;
  }
}

TEST(Interpolate, NearZeroBranchIsContinuous) {
  const auto g = GenFn::build(GenFnKind::Phase, 3);
  const auto table = first_zeros(g, 100);
  const auto s = sample_function(table, band_limited);
  const double x = table[4].lambda;
  const cplx on = interpolate_even(table, g, s, x);
  for (double h : {1e-9, -1e-9, 1e-7, -1e-7}) {
    EXPECT_LE(std::abs(interpolate_even(table, g, s, x + h) - on), 1e-6) << h;
    EXPECT_LE(std::abs(interpolate(table, g, s, x + h) - on), 1e-6) << h;
  }
}

TEST(Interpolate, TruncationErrorShrinksWithTerms) {
  for (const auto kind : {GenFnKind::Phase, GenFnKind::Attenuation}) {
    for (int f : {1, 3, 5}) {
      const auto g = GenFn::build(kind, f);
      const auto table = first_zeros(g, 200);
      const auto s = sample_function(table, band_limited);
      double prev = INFINITY;
      for (std::size_t n : {25, 50, 100, 200}) {
        InterpConfig cfg;
        cfg.n_terms = n;
        double err = 0.0;
        for (double t = -5; t <= 5; t += 0.05) {
          err = std::max(err, std::abs(interpolate_even(table, g, s, t, cfg) -
                                       band_limited(t)));
        }
        EXPECT_LE(err, 1.1 * prev) << to_string(kind) << " f=" << f << " N=" << n;
        prev = err;
      }
    }
  }
}

TEST(Interpolate, RequiredRadius) {
  EXPECT_DOUBLE_EQ(required_table_radius(10.0), 20.0);
  EXPECT_DOUBLE_EQ(required_table_radius(10.0, 1.5), 15.0);
  EXPECT_THROW(required_table_radius(10.0, 0.5), ContractError);
}

TEST(Wks, ModelValues) {
  EXPECT_NEAR(wks_model(WksModel::Literal, 0.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(wks_model(WksModel::Literal, 1e-9), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(wks_model(WksModel::BandFitted, 0.0), 1.0 / 3.0, 1e-15);
  for (int k = 1; k < 10; ++k) {
    EXPECT_NEAR(wks_model(WksModel::Literal, k),
                -std::sin(4 * oracle::pi * k / 3) / (oracle::pi * k), 1e-14);
    EXPECT_NEAR(wks_model(WksModel::Literal, -k), wks_model(WksModel::Literal, k), 1e-15);
  }
}

TEST(Wks, PinnedTruncationErrors) {
  const std::pair<int, double> band[] = {{4, 0.05718811886302944},
                                         {8, 0.00172135618621172},
                                         {16, 4.41819279711278e-05},
                                         {32, 2.736725467126014e-05}};
  for (const auto& [n, want] : band) {
    const auto r = wks_truncation_demo(n);
    EXPECT_NEAR(r.max_abs_error, want, 1e-12 * std::max(1.0, want) + 1e-15) << n;
  }
  EXPECT_NEAR(wks_truncation_demo(0, WksModel::Literal).max_abs_error,
              0.9906740473380823, 1e-12);
  EXPECT_NEAR(wks_truncation_demo(8, WksModel::Literal).max_abs_error,
              1.1396574003687303, 1e-12);
}

TEST(Wks, BandFittedEightMeetsStatedBound) {
  const auto r = wks_truncation_demo(8);
  EXPECT_LE(r.max_abs_error, 0.006);
  EXPECT_LE(wks_truncation_demo(32).max_abs_error, r.max_abs_error);
  EXPECT_EQ(r.t.size(), 12001u);
  EXPECT_GT(wks_truncation_demo(0).max_abs_error, 0.0);
}

TEST(Wks, ErrorCurveCsv) {
  const auto r = wks_truncation_demo(2, uniform_grid(1.0, 0.5));
  std::ostringstream os;
  r.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,truth,approx,error");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_THROW(wks_truncation_demo(-1), DomainError);
}
