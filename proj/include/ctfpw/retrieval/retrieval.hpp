#pragma once

// One-step reconstruction of either object channel from CTF data.
//
// Along every direction theta the radial slice t -> X^(t theta) of the
// target channel lies in the Paley-Wiener space. At the zeros lambda of the
// matching generating function the other channel drops out of the CTF data,
// X^(lambda theta) = (-1)^l Psi^(lambda theta), and the slice is recovered by
// the paired cardinal series. Every node of the output frequency grid is
// evaluated on its nearest direction, then the spectrum is inverted.

#include <chrono>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ctfpw/core/error.hpp"
#include "ctfpw/core/fourier.hpp"
#include "ctfpw/core/geometry.hpp"
#include "ctfpw/core/grid.hpp"
#include "ctfpw/core/parallel.hpp"
#include "ctfpw/forward/phantom.hpp"
#include "ctfpw/forward/sampler.hpp"
#include "ctfpw/genfn/genfn.hpp"
#include "ctfpw/genfn/zero_table.hpp"
#include "ctfpw/interp/paley_wiener.hpp"

namespace ctfpw {

/// Sin: the channel multiplied by sin(pi |eta|^2 / f), recovered at the
/// zeros of Z_f. Cos: the channel multiplied by the cosine, via W_f.
enum class Channel { Sin, Cos };

inline std::string_view to_string(Channel c) {
  return c == Channel::Sin ? "sin" : "cos";
}

inline Channel parse_channel(std::string_view s) {
  if (s == "sin") return Channel::Sin;
  if (s == "cos") return Channel::Cos;
  throw UnsupportedConfiguration("unknown channel: " + std::string(s));
}

inline GenFnKind genfn_kind_for(Channel c) {
  return c == Channel::Sin ? GenFnKind::Phase : GenFnKind::Attenuation;
}

struct ReconConfig {
  int n_directions = 64;
  double zero_margin = 2.0;
  std::optional<std::size_t> n_terms;
  Grid2D output{128, 2.0};
  unsigned threads = 1;
  double near_zero_eps = 1e-8;

  void validate() const {
    if (n_directions < 4) throw ContractError("n_directions must be >= 4");
    if (!(zero_margin >= 1.0)) throw ContractError("zero_margin must be >= 1");
    if (n_terms && *n_terms < 1) throw ContractError("n_terms must be >= 1");
    InterpConfig{n_terms, near_zero_eps}.validate();
  }

  InterpConfig interp() const { return {std::nullopt, near_zero_eps}; }
};

/// Target field for metrics: the inverse transform of the exact channel
/// spectrum at the output frequency nodes (band-limited to the grid), plus
/// the pointwise indicator for reference.
struct GroundTruth {
  RealField2D field;
  ComplexField2D spectrum;
  RealField2D indicator;
};

struct ReconReport {
  std::string channel;
  std::string genfn;
  int fresnel = 0;
  std::string sampler;
  int n_directions = 0;
  std::size_t n_terms = 0;
  double table_radius = 0.0;
  double eval_radius = 0.0;
  int grid_n = 0;
  double grid_extent = 0.0;
  double scale = 1.0;
  double imag_residue = 0.0;
  double hermitian_defect = 0.0;
  std::optional<double> rel_l2_error;
  std::optional<double> max_abs_error;
  std::optional<double> indicator_rel_l2;
  std::vector<double> direction_residuals;
  double sampling_seconds = 0.0;
  double evaluation_seconds = 0.0;
  double total_seconds = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j{
        {"channel", channel},
        {"genfn", genfn},
        {"fresnel", fresnel},
        {"sampler", sampler},
        {"n_directions", n_directions},
        {"n_terms", n_terms},
        {"table_radius", table_radius},
        {"eval_radius", eval_radius},
        {"grid", {{"n", grid_n}, {"extent", grid_extent}}},
        {"scale", scale},
        {"imag_residue", imag_residue},
        {"hermitian_defect", hermitian_defect},
        {"timing",
         {{"sampling_s", sampling_seconds},
          {"evaluation_s", evaluation_seconds},
          {"total_s", total_seconds}}},
    };
    nlohmann::json metrics = nlohmann::json::object();
    if (rel_l2_error) metrics["rel_l2_error"] = *rel_l2_error;
    if (max_abs_error) metrics["max_abs_error"] = *max_abs_error;
    if (indicator_rel_l2) metrics["indicator_rel_l2"] = *indicator_rel_l2;
    if (!direction_residuals.empty()) {
      metrics["direction_residuals"] = direction_residuals;
    }
    j["metrics"] = metrics;
    return j;
  }
};

struct ReconResult {
  RealField2D field;
  ComplexField2D spectrum;
  ReconReport report;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

inline int require_integral_fresnel(double f) {
  const long long fi = integral_fresnel(f);
  if (fi <= 0 || fi > 1'000'000) {
    std::ostringstream msg;
    msg << "Fresnel number " << f
        << " is not a positive integer; rescale with choose_odd_fresnel "
           "(--refresnel) first";
    throw UnsupportedConfiguration(msg.str());
  }
  return static_cast<int>(fi);
}

// Map eta to (direction index, signed radius) on the nearest of `count`
// directions theta_d = d pi / count.
inline std::pair<int, double> nearest_direction(Vec2 eta, int count) {
  const double r = eta.norm();
  if (r == 0.0) return {0, 0.0};
  double angle = std::atan2(eta.x2, eta.x1);
  double t = r;
  if (angle < 0.0) {
    angle += std::numbers::pi;
    t = -t;
  }
  if (angle >= std::numbers::pi) {
    angle -= std::numbers::pi;
    t = -t;
  }
  int d = static_cast<int>(std::lround(angle * count / std::numbers::pi));
  if (d >= count) {
    d -= count;
    t = -t;
  }
  return {d, t};
}

// Averages each node with the conjugate of its mirror (index n - m mod n).
inline double hermitian_symmetrize(ComplexField2D& s) {
  const int n = s.n();
  double peak = 0.0;
  for (const auto& v : s.values()) peak = std::max(peak, std::abs(v));
  double defect = 0.0;
  ComplexField2D out(s.grid());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& a = s(i, j);
      const auto b = std::conj(s((n - i) % n, (n - j) % n));
      if (i > 0 && j > 0) defect = std::max(defect, std::abs(a - b));
      out(i, j) = 0.5 * (a + b);
    }
  }
  s = std::move(out);
  return peak > 0.0 ? defect / peak : 0.0;
}

inline bool in_support(Vec2 y) { return y.norm_sq() <= 0.25; }

struct SupportErrors {
  double rel_l2;
  double max_abs;
};

inline SupportErrors support_errors(const RealField2D& rec,
                                    const RealField2D& truth) {
  const Grid2D& g = rec.grid();
  double num = 0.0;
  double den = 0.0;
  double worst = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      if (!in_support(g.point(i, j))) continue;
      const double e = rec(i, j) - truth(i, j);
      num += e * e;
      den += truth(i, j) * truth(i, j);
      worst = std::max(worst, std::abs(e));
    }
  }
  const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return {rel, worst};
}

inline double support_norm(const RealField2D& f) {
  const Grid2D& g = f.grid();
  double acc = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      if (in_support(g.point(i, j))) acc += f(i, j) * f(i, j);
    }
  }
  return std::sqrt(acc);
}

}  // namespace detail

/// Zero table covering |t| <= max frequency radius of the grid with margin.
inline ZeroTable reconstruction_table(const GenFn& g, const ReconConfig& cfg) {
  const double needed = cfg.zero_margin * cfg.output.max_freq_radius();
  ZeroTable table = zeros_up_to(g, needed, 1);
  if (cfg.n_terms) {
    if (*cfg.n_terms > table.size()) {
      table = first_zeros(g, *cfg.n_terms);
    } else {
      table = table.truncated(*cfg.n_terms);
    }
  }
  return table;
}

/// Samples (-1)^l Psi^(+-lambda theta) for one direction.
inline SampleSet ray_samples(const CtfSampler& sampler, const ZeroTable& table,
                             Vec2 theta, unsigned threads = 1) {
  std::vector<Vec2> pts;
  pts.reserve(2 * table.size());
  for (const auto& e : table) pts.push_back(theta * e.lambda);
  for (const auto& e : table) pts.push_back(theta * (-e.lambda));
  const auto v = sampler.sample(pts, threads);
  SampleSet s;
  s.values_pos.resize(table.size());
  s.values_neg.resize(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double sign = (table[i].l % 2 == 0) ? 1.0 : -1.0;
    s.values_pos[i] = sign * v[i];
    s.values_neg[i] = sign * v[table.size() + i];
  }
  return s;
}

inline std::complex<double> reconstruct_spectrum_on_ray(
    const CtfSampler& sampler, const GenFn& g, const ZeroTable& table,
    Direction theta, double t, const ReconConfig& cfg) {
  cfg.validate();
  if (std::abs(t) > table.radius() / cfg.zero_margin * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "|t| = " << std::abs(t) << " exceeds table radius / margin = "
        << table.radius() / cfg.zero_margin;
    throw TruncationDomainError(msg.str());
  }
  const SampleSet s = ray_samples(sampler, table, theta.unit(), cfg.threads);
  return interpolate_even(table, g, s, t, cfg.interp());
}

inline GroundTruth analytic_truth(const Phantom& phantom, Channel channel,
                                  const Grid2D& grid) {
  ComplexField2D spec(grid);
  const int n = grid.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto [m, p] = phantom_spectrum(phantom, grid.freq_point(i, j));
      spec(i, j) = channel == Channel::Sin ? p : m;
    }
  }
  detail::hermitian_symmetrize(spec);
  RealField2D field = real_part(fft2_inverse(spec));
  ProjectionPair pair = phantom_fields(phantom, grid);
  RealField2D ind = channel == Channel::Sin ? pair.phi : pair.mu;
  return GroundTruth{std::move(field), std::move(spec), std::move(ind)};
}

inline ReconResult reconstruct_field(const CtfSampler& sampler, Channel channel,
                                     const ReconConfig& cfg,
                                     const GroundTruth* truth = nullptr) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const int f = detail::require_integral_fresnel(sampler.fresnel());
  const GenFn g = GenFn::build(genfn_kind_for(channel), f);
  if (!g.is_entire()) {
    throw UnsupportedConfiguration(
        g.describe() + " is not entire, so its zero set does not determine a "
        "band-limited spectrum; rescale to an odd Fresnel number");
  }
  const ZeroTable table = reconstruction_table(g, cfg);
  const Grid2D& grid = cfg.output;
  const double eval_radius = grid.max_freq_radius();
  if (eval_radius > table.radius() / cfg.zero_margin * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "zero table radius " << table.radius() << " with margin "
        << cfg.zero_margin << " does not cover the grid's frequency radius "
        << eval_radius;
    throw TruncationDomainError(msg.str());
  }
  if (truth && !(truth->field.grid() == grid)) {
    throw ContractError("ground truth grid differs from the output grid");
  }

  const int nd = cfg.n_directions;
  const std::size_t nz = table.size();
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(nd) * 2 * nz);
  for (int d = 0; d < nd; ++d) {
    const Vec2 theta = Direction::uniform(d, nd).unit();
    for (const auto& e : table) pts.push_back(theta * e.lambda);
    for (const auto& e : table) pts.push_back(theta * (-e.lambda));
  }
  const auto raw = sampler.sample(pts, cfg.threads);
  std::vector<SampleSet> rays(nd);
  for (int d = 0; d < nd; ++d) {
    const std::size_t base = static_cast<std::size_t>(d) * 2 * nz;
    rays[d].values_pos.resize(nz);
    rays[d].values_neg.resize(nz);
    for (std::size_t i = 0; i < nz; ++i) {
      const double sign = (table[i].l % 2 == 0) ? 1.0 : -1.0;
      rays[d].values_pos[i] = sign * raw[base + i];
      rays[d].values_neg[i] = sign * raw[base + nz + i];
    }
  }
  const double sampling_s = detail::seconds_since(t_start);

  const auto t_eval = std::chrono::steady_clock::now();
  const int n = grid.n();
  ComplexField2D spec(grid);
  std::vector<int> node_direction(grid.size());
  const InterpConfig icfg = cfg.interp();
  parallel_for(grid.size(), cfg.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / n);
    const int j = static_cast<int>(idx % n);
    const auto [d, t] = detail::nearest_direction(grid.freq_point(i, j), nd);
    node_direction[idx] = d;
    spec(i, j) = interpolate_even(table, g, rays[d], t, icfg);
  });

  ReconReport rep;
  rep.direction_residuals.clear();
  if (truth) {
    std::vector<double> num(nd, 0.0), den(nd, 0.0);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const auto a = spec.values()[idx];
      const auto b = truth->spectrum.values()[idx];
      num[node_direction[idx]] += std::norm(a - b);
      den[node_direction[idx]] += std::norm(b);
    }
    for (int d = 0; d < nd; ++d) {
      rep.direction_residuals.push_back(
          den[d] > 0.0 ? std::sqrt(num[d] / den[d]) : std::sqrt(num[d]));
    }
  }

  rep.hermitian_defect = detail::hermitian_symmetrize(spec);
  const ComplexField2D back = fft2_inverse(spec);
  double peak = 0.0;
  double imag = 0.0;
  for (const auto& v : back.values()) {
    peak = std::max(peak, std::abs(v.real()));
    imag = std::max(imag, std::abs(v.imag()));
  }
  RealField2D field = real_part(back);
  rep.evaluation_seconds = detail::seconds_since(t_eval);

  rep.channel = std::string(to_string(channel));
  rep.genfn = g.describe();
  rep.fresnel = f;
  rep.sampler = sampler.name();
  rep.n_directions = nd;
  rep.n_terms = nz;
  rep.table_radius = table.radius();
  rep.eval_radius = eval_radius;
  rep.grid_n = grid.n();
  rep.grid_extent = grid.extent();
  rep.imag_residue = peak > 0.0 ? imag / peak : imag;
  rep.sampling_seconds = sampling_s;
  if (truth) {
    const auto e = detail::support_errors(field, truth->field);
    rep.rel_l2_error = e.rel_l2;
    rep.max_abs_error = e.max_abs;
    rep.indicator_rel_l2 = detail::support_errors(field, truth->indicator).rel_l2;
  }
  rep.total_seconds = detail::seconds_since(t_start);
  return ReconResult{std::move(field), std::move(spec), std::move(rep)};
}

/// Reconstruction at a non-odd Fresnel number: the support is enlarged by
/// scale = sqrt(f_odd / f) so that the data appear at the odd Fresnel number
/// f_odd, reconstructed there, and relabelled back onto cfg.output.
inline ReconResult reconstruct_field_refresnel(
    std::shared_ptr<const CtfSampler> sampler, Channel channel,
    const ReconConfig& cfg, const GroundTruth* truth = nullptr) {
  const OddFresnel odd = choose_odd_fresnel(sampler->fresnel());
  const ScaledSampler scaled(sampler, odd.scale);
  ReconConfig scaled_cfg = cfg;
  scaled_cfg.output = Grid2D(cfg.output.n(), cfg.output.extent() / odd.scale);
  ReconResult r = reconstruct_field(scaled, channel, scaled_cfg);
  RealField2D field(cfg.output, std::vector<double>(r.field.values().begin(),
                                                    r.field.values().end()));
  const double w = odd.scale * odd.scale;
  ComplexField2D spec(cfg.output);
  for (std::size_t i = 0; i < spec.values().size(); ++i) {
    spec.values()[i] = w * r.spectrum.values()[i];
  }
  r.report.scale = odd.scale;
  r.report.grid_extent = cfg.output.extent();
  if (truth) {
    const auto e = detail::support_errors(field, truth->field);
    r.report.rel_l2_error = e.rel_l2;
    r.report.max_abs_error = e.max_abs;
    r.report.indicator_rel_l2 =
        detail::support_errors(field, truth->indicator).rel_l2;
    r.report.direction_residuals.clear();
  }
  return ReconResult{std::move(field), std::move(spec), std::move(r.report)};
}

struct LeakageReport {
  Channel populated = Channel::Sin;
  double populated_rel_l2 = 0.0;
  // Support norm of the empty channel's reconstruction relative to the
  // support norm of the populated channel's truth.
  double leakage = 0.0;
};

/// Reconstructs both channels of a single-channel phantom.
inline LeakageReport channel_leakage_check(const Phantom& phantom, double f,
                                           const ReconConfig& cfg) {
  bool has_mu = false;
  bool has_phi = false;
  for (const auto& c : phantom.components) {
    has_mu = has_mu || c.mu != 0.0;
    has_phi = has_phi || c.phi != 0.0;
  }
  if (has_mu && has_phi) {
    throw ContractError("leakage check needs a phantom with one channel");
  }
  LeakageReport rep;
  rep.populated = has_mu ? Channel::Cos : Channel::Sin;
  const Channel empty = has_mu ? Channel::Sin : Channel::Cos;
  const AnalyticSampler sampler(phantom, f);
  const GroundTruth truth = analytic_truth(phantom, rep.populated, cfg.output);
  const ReconResult full = reconstruct_field(sampler, rep.populated, cfg, &truth);
  const ReconResult other = reconstruct_field(sampler, empty, cfg);
  rep.populated_rel_l2 = full.report.rel_l2_error.value_or(0.0);
  const double ref = detail::support_norm(truth.field);
  const double leak = detail::support_norm(other.field);
  rep.leakage = ref > 0.0 ? leak / ref : leak;
  return rep;
}

}  // namespace ctfpw
