#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ctfpw.hpp"

namespace ctfpw::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Verification failures are reported through this exception so that every
// command shares one exit-code mapping.
struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir);
  return p;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Phantom load_phantom(const std::string& path) {
  return parse_phantom(read_text(path));
}

json report_json(const ValidationReport& r) {
  return {{"checked", r.checked}, {"ok", r.ok()}, {"failures", r.failures}};
}

json sine_type_json(const SineTypeReport& s) {
  return {{"H", s.H},
          {"x_max", s.x_max},
          {"samples", s.samples},
          {"A_est", s.A_est},
          {"B_est", s.B_est},
          {"delta_est", s.delta_est},
          {"separation", s.separation},
          {"skipped", s.skipped},
          {"note", s.note},
          {"passed", s.passed()}};
}

// ---------------------------------------------------------------- zeros

struct ZerosOptions {
  std::string kind;
  int fresnel = 1;
  double max_radius = 10.0;
  std::optional<std::size_t> count;
  double sine_h = 3.0;
  std::string out = ".";
};

int cmd_zeros(const ZerosOptions& o, std::ostream& out) {
  const GenFn g = GenFn::build(parse_genfn_kind(o.kind), o.fresnel);
  const ZeroTable table =
      o.count ? first_zeros(g, *o.count) : zeros_up_to(g, o.max_radius);
  const fs::path dir = prepare_out_dir(o.out);

  const fs::path csv = dir / "zeros.csv";
  {
    std::ofstream os(csv);
    table.write_csv(os);
  }
  const ValidationReport ident = check_zero_identities(table, g);
  const ValidationReport order = check_ordering(table, g);
  const SineTypeReport sine = verify_sine_type(g, o.sine_h);
  const json validation{{"genfn", g.describe()},
                        {"zeros", table.size()},
                        {"separation", table.separation()},
                        {"identities", report_json(ident)},
                        {"ordering", report_json(order)},
                        {"sine_type", sine_type_json(sine)}};
  const fs::path vpath = dir / "validation.json";
  io::write_json_file(vpath, validation);

  io::RunManifest m = io::RunManifest::for_command("zeros");
  m.parameters = {{"kind", o.kind},
                  {"fresnel", o.fresnel},
                  {"max_radius", o.max_radius},
                  {"count", o.count ? json(*o.count) : json(nullptr)},
                  {"sine_H", o.sine_h}};
  m.add_output("zeros", csv);
  m.add_output("validation", vpath);
  m.write(dir / "manifest.json");

  out << g.describe() << ": " << table.size() << " zeros -> " << csv.string()
      << "\n  identities " << (ident.ok() ? "ok" : "FAILED") << ", ordering "
      << (order.ok() ? "ok" : "FAILED") << ", sine-type "
      << (sine.skipped ? "skipped" : (sine.passed() ? "ok" : "FAILED"));
  if (!sine.skipped) {
    out << " (A=" << sine.A_est << " B=" << sine.B_est
        << " delta=" << sine.delta_est << ")";
  }
  out << '\n';
  if (!ident.ok() || !order.ok() || !sine.passed()) {
    throw VerificationFailed("zero table validation failed");
  }
  return kSuccess;
}

// ------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string phantom;
  double fresnel = 1.0;
  int grid = 512;
  double extent = 4.0;
  std::string model = "linear";
  std::string out = ".";
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const Phantom ph = load_phantom(o.phantom);
  const HologramModel model = parse_hologram_model(o.model);
  const Grid2D grid(o.grid, o.extent);
  const ProjectionPair pair = phantom_fields(ph, grid);
  const Hologram h = simulate_hologram(pair, o.fresnel, model);
  const fs::path dir = prepare_out_dir(o.out);

  const FresnelGeometry& geo = h.geometry;
  const json geometry{{"k", geo.wavenumber()},
                      {"b", geo.support_diameter()},
                      {"d", geo.distance()},
                      {"f", geo.fresnel_number()},
                      {"extent", grid.extent()},
                      {"n", grid.n()},
                      {"model", std::string(to_string(model))}};
  const auto holo = io::write_field(dir / "hologram", h.intensity,
                                    {{"geometry", geometry}, {"fresnel", o.fresnel}});
  const auto mu = io::write_field(dir / "mu", pair.mu, {{"channel", "cos"}});
  const auto phi = io::write_field(dir / "phi", pair.phi, {{"channel", "sin"}});
  const fs::path pgm = dir / "hologram.pgm";
  const io::PgmScale scale = io::write_pgm16(pgm, h.intensity);

  io::RunManifest m = io::RunManifest::for_command("simulate");
  m.parameters = {{"fresnel", o.fresnel},
                  {"grid", o.grid},
                  {"extent", o.extent},
                  {"model", o.model},
                  {"phantom", json(ph)},
                  {"geometry", geometry},
                  {"pgm_scale", {{"min", scale.min}, {"max", scale.max}}}};
  m.inputs["phantom"] = o.phantom;
  m.add_output("hologram", holo.data);
  m.add_output("hologram_manifest", holo.manifest);
  m.add_output("mu", mu.data);
  m.add_output("phi", phi.data);
  m.add_output("quicklook", pgm);
  m.write(dir / "manifest.json");

  out << "simulated " << to_string(model) << " hologram f=" << o.fresnel
      << " on " << o.grid << "^2, extent " << o.extent << "; intensity in ["
      << scale.min << ", " << scale.max << "] -> " << holo.manifest.string()
      << '\n';
  return kSuccess;
}

// ---------------------------------------------------------- reconstruct

struct ReconstructOptions {
  std::string hologram;
  std::string analytic;
  std::optional<double> fresnel;
  std::string channel = "sin";
  int directions = 64;
  std::optional<std::size_t> zeros;
  int grid = 128;
  double extent = 2.0;
  double margin = 2.0;
  unsigned threads = 1;
  bool refresnel = false;
  std::string truth;
  std::string out = ".";
};

void write_profile(const fs::path& path, const RealField2D& field,
                   const RealField2D* truth) {
  const Grid2D& g = field.grid();
  const double dr = g.spacing();
  const int bins = g.n() / 2;
  std::vector<double> sum(bins, 0.0), tsum(bins, 0.0);
  std::vector<long> count(bins, 0);
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      const int b = static_cast<int>(g.point(i, j).norm() / dr);
      if (b >= bins) continue;
      sum[b] += field(i, j);
      if (truth) tsum[b] += (*truth)(i, j);
      ++count[b];
    }
  }
  std::ofstream os(path);
  os.precision(17);
  os << "r,value" << (truth ? ",truth" : "") << '\n';
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    os << (b + 0.5) * dr << ',' << sum[b] / count[b];
    if (truth) os << ',' << tsum[b] / count[b];
    os << '\n';
  }
}

int cmd_reconstruct(const ReconstructOptions& o, std::ostream& out) {
  const Channel channel = parse_channel(o.channel);
  std::shared_ptr<const CtfSampler> sampler;
  std::optional<Phantom> truth_phantom;
  io::RunManifest m = io::RunManifest::for_command("reconstruct");
  json params{{"channel", o.channel},
              {"directions", o.directions},
              {"zeros", o.zeros ? json(*o.zeros) : json(nullptr)},
              {"grid", o.grid},
              {"extent", o.extent},
              {"margin", o.margin},
              {"refresnel", o.refresnel}};

  if (!o.hologram.empty() == !o.analytic.empty()) {
    throw ValidationError("give exactly one of --hologram or --analytic");
  }
  if (!o.hologram.empty()) {
    const fs::path hpath(o.hologram);
    auto loaded = io::read_field<double>(hpath);
    double f = 0.0;
    HologramModel model = HologramModel::Linear;
    try {
      const json& geo = loaded.extra.at("geometry");
      f = geo.at("f").get<double>();
      model = parse_hologram_model(geo.at("model").get<std::string>());
    } catch (const json::exception&) {
      throw ValidationError(o.hologram + ": manifest lacks geometry.f / model");
    }
    if (o.fresnel && std::abs(*o.fresnel - f) > 1e-12 * f) {
      throw ValidationError("--fresnel disagrees with the hologram manifest");
    }
    Hologram h{std::move(loaded.field), FresnelGeometry::from_fresnel_number(f),
               model};
    sampler = std::make_shared<HologramSampler>(h);
    params["sampler"] = "hologram";
    params["fresnel"] = f;
    m.inputs["hologram"] = o.hologram;
    m.inputs["hologram_checksum"] = io::file_checksum(
        hpath.parent_path() / io::read_json_file(hpath).at("data").get<std::string>());
  } else {
    if (!o.fresnel) throw ValidationError("--analytic requires --fresnel");
    const Phantom ph = load_phantom(o.analytic);
    sampler = std::make_shared<AnalyticSampler>(ph, *o.fresnel);
    truth_phantom = ph;
    params["sampler"] = "analytic";
    params["fresnel"] = *o.fresnel;
    params["phantom"] = json(ph);
    m.inputs["phantom"] = o.analytic;
  }
  if (!o.truth.empty()) {
    truth_phantom = load_phantom(o.truth);
    m.inputs["truth"] = o.truth;
  }

  ReconConfig cfg;
  cfg.n_directions = o.directions;
  cfg.zero_margin = o.margin;
  cfg.n_terms = o.zeros;
  cfg.output = Grid2D(o.grid, o.extent);
  cfg.threads = resolve_threads(o.threads);

  std::optional<GroundTruth> truth;
  if (truth_phantom) truth = analytic_truth(*truth_phantom, channel, cfg.output);
  const GroundTruth* tp = truth ? &*truth : nullptr;

  ReconResult r = [&] {
    if (o.refresnel) return reconstruct_field_refresnel(sampler, channel, cfg, tp);
    try {
      return reconstruct_field(*sampler, channel, cfg, tp);
    } catch (const UnsupportedConfiguration& e) {
      throw UnsupportedConfiguration(std::string(e.what()) +
                                     "; rerun with --refresnel");
    }
  }();

  const fs::path dir = prepare_out_dir(o.out);
  const json report = r.report.to_json();
  const auto field = io::write_field(dir / "field", r.field,
                                     {{"channel", o.channel}, {"report", report}});
  const fs::path metrics = dir / "metrics.json";
  io::write_json_file(metrics, report);
  const fs::path profile = dir / "profile.csv";
  write_profile(profile, r.field, truth ? &truth->field : nullptr);

  m.parameters = params;
  m.execution = {{"threads", cfg.threads}, {"timing", report.at("timing")}};
  m.add_output("field", field.data);
  m.add_output("metrics", metrics);
  m.add_output("profile", profile);
  m.write(dir / "manifest.json");

  out << "reconstructed " << o.channel << " channel with " << r.report.genfn
      << " (" << r.report.n_terms << " zeros, " << r.report.n_directions
      << " directions, sampler " << r.report.sampler << ")";
  if (r.report.rel_l2_error) {
    out << "\n  rel_l2_error=" << *r.report.rel_l2_error
        << " max_abs_error=" << *r.report.max_abs_error;
  }
  out << "\n  -> " << field.manifest.string() << '\n';
  return kSuccess;
}

// --------------------------------------------------------------- verify

struct VerifyOptions {
  std::string fresnel = "1,3,5,7,9";
  std::string kinds = "both";
  std::size_t count = 500;
  double sine_h = 3.0;
  double scan_upper = 30.0;
  std::string report;
  std::string out;
  bool inject_fault = false;
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw ValidationError("not an integer in --fresnel list: " + item);
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty --fresnel list");
  return out;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  std::vector<GenFnKind> kinds;
  if (o.kinds == "both" || o.kinds == "phase") kinds.push_back(GenFnKind::Phase);
  if (o.kinds == "both" || o.kinds == "attenuation") {
    kinds.push_back(GenFnKind::Attenuation);
  }
  if (kinds.empty()) throw ValidationError("--kinds must be phase, attenuation or both");
  const std::vector<int> fs_list = parse_int_list(o.fresnel);

  json cases = json::array();
  bool all_ok = true;
  std::size_t ran = 0;
  std::vector<std::string> failures;
  for (int f : fs_list) {
    for (GenFnKind kind : kinds) {
      std::optional<GenFn> g;
      try {
        g = GenFn::build(kind, f);
      } catch (const UnsupportedConfiguration&) {
        if (o.kinds != "both") throw;
        out << to_string(kind) << " f=" << f << ": skipped (unsupported)\n";
        continue;
      }
      ++ran;
      const auto t0 = std::chrono::steady_clock::now();
      ZeroTable table = first_zeros(*g, o.count);
      if (o.inject_fault && table.size() > 3) {
        table.mutable_entries_for_testing()[3].lambda_sq += 0.25;
      }
      ValidationReport ident = check_zero_identities(table, *g);
      ValidationReport order = check_ordering(table, *g);
      ValidationReport deriv = check_derivatives(table, *g);
      ValidationReport complete = check_enumeration_completeness(*g, o.scan_upper);
      const SineTypeReport sine = verify_sine_type(*g, o.sine_h);
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      const bool ok = ident.ok() && order.ok() && deriv.ok() && complete.ok() &&
                      sine.passed() && table.separation() > 0.0;
      all_ok = all_ok && ok;
      for (const auto* r : {&ident, &order, &deriv, &complete}) {
        failures.insert(failures.end(), r->failures.begin(), r->failures.end());
      }
      if (!sine.passed()) failures.push_back(g->describe() + ": sine-type bounds failed");
      cases.push_back({{"genfn", g->describe()},
                       {"kind", std::string(to_string(kind))},
                       {"fresnel", f},
                       {"zeros", table.size()},
                       {"separation", table.separation()},
                       {"identities", report_json(ident)},
                       {"ordering", report_json(order)},
                       {"derivatives", report_json(deriv)},
                       {"completeness", report_json(complete)},
                       {"sine_type", sine_type_json(sine)},
                       {"ok", ok}});
      out << std::left << std::setw(12) << to_string(kind) << " f=" << std::setw(3)
          << f << " " << table.size() << " zeros, c=" << std::setprecision(4)
          << table.separation() << ", sine-type "
          << (sine.skipped ? "skipped" : (sine.passed() ? "ok" : "FAILED"))
          << ", " << (ok ? "PASS" : "FAIL") << std::setprecision(6) << " ("
          << secs << " s)\n";
    }
  }
  if (ran == 0) throw UnsupportedConfiguration("no supported (kind, f) to verify");

  const json report{{"ok", all_ok}, {"cases", cases}, {"failures", failures}};
  io::RunManifest m = io::RunManifest::for_command("verify");
  m.parameters = {{"fresnel", fs_list},
                  {"kinds", o.kinds},
                  {"count", o.count},
                  {"sine_H", o.sine_h},
                  {"scan_upper", o.scan_upper},
                  {"inject_fault", o.inject_fault}};
  std::optional<fs::path> dir;
  if (!o.out.empty()) dir = prepare_out_dir(o.out);
  fs::path report_path = !o.report.empty() ? fs::path(o.report)
                         : dir             ? *dir / "verify.json"
                                           : fs::path();
  if (!report_path.empty()) {
    if (report_path.has_parent_path()) {
      prepare_out_dir(report_path.parent_path().string());
    }
    io::write_json_file(report_path, report);
    m.add_output("report", report_path);
  }
  const fs::path mdir =
      dir ? *dir : (report_path.empty() ? fs::path(".") : report_path.parent_path());
  m.write((mdir.empty() ? fs::path(".") : mdir) / "manifest.json");

  if (!all_ok) {
    for (const auto& f : failures) out << "  " << f << '\n';
    throw VerificationFailed(std::to_string(failures.size()) +
                             " verification failures");
  }
  return kSuccess;
}

// ------------------------------------------------------------- wks-demo

struct WksOptions {
  int n = 8;
  bool literal = false;
  double t_max = 6.0;
  double step = 1e-3;
  std::string out = ".";
};

int cmd_wks(const WksOptions& o, std::ostream& out) {
  const WksModel model = o.literal ? WksModel::Literal : WksModel::BandFitted;
  const WksDemoResult r =
      wks_truncation_demo(o.n, uniform_grid(o.t_max, o.step), model);
  const fs::path dir = prepare_out_dir(o.out);
  const fs::path csv = dir / "wks.csv";
  {
    std::ofstream os(csv);
    r.write_csv(os);
  }
  io::RunManifest m = io::RunManifest::for_command("wks-demo");
  m.parameters = {{"n", o.n},
                  {"model", std::string(to_string(model))},
                  {"t_max", o.t_max},
                  {"step", o.step},
                  {"max_abs_error", r.max_abs_error},
                  {"argmax_t", r.argmax_t}};
  m.add_output("curve", csv);
  m.write(dir / "manifest.json");
  out << std::setprecision(10) << "N=" << o.n << " model=" << to_string(model)
      << " max|g-g_N|=" << r.max_abs_error << " at t=" << r.argmax_t << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"One-step CTF phase retrieval with sine-type generating functions",
               "ctfpw"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  ZerosOptions zo;
  auto* zeros = app.add_subcommand("zeros", "Tabulate and validate generating-function zeros");
  zeros->add_option("--kind", zo.kind, "phase or attenuation")->required();
  zeros->add_option("--fresnel", zo.fresnel, "Fresnel number")->required();
  zeros->add_option("--max-radius", zo.max_radius, "Largest zero radius")
      ->capture_default_str();
  zeros->add_option("--count", zo.count, "Tabulate the first N zeros instead");
  zeros->add_option("--sine-H", zo.sine_h, "Strip half-width for the sine-type check")
      ->capture_default_str();
  zeros->add_option("--out", zo.out, "Output directory")->capture_default_str();

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "Simulate a hologram from a phantom");
  sim->add_option("--phantom", so.phantom, "Phantom JSON file")->required();
  sim->add_option("--fresnel", so.fresnel, "Fresnel number")->required();
  sim->add_option("--grid", so.grid, "Samples per axis")->capture_default_str();
  sim->add_option("--extent", so.extent, "Field width in support diameters")
      ->capture_default_str();
  sim->add_option("--model", so.model, "linear or full")->capture_default_str();
  sim->add_option("--out", so.out, "Output directory")->capture_default_str();

  ReconstructOptions ro;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct one channel from CTF data");
  rec->add_option("--hologram", ro.hologram, "Hologram manifest (hologram.json)");
  rec->add_option("--analytic", ro.analytic, "Phantom JSON for exact data");
  rec->add_option("--fresnel", ro.fresnel, "Fresnel number (with --analytic)");
  rec->add_option("--channel", ro.channel, "sin or cos")->capture_default_str();
  rec->add_option("--directions", ro.directions, "Number of directions")
      ->capture_default_str();
  rec->add_option("--zeros", ro.zeros, "Number of zeros (default: margin rule)");
  rec->add_option("--grid", ro.grid, "Output samples per axis")->capture_default_str();
  rec->add_option("--extent", ro.extent, "Output field width")->capture_default_str();
  rec->add_option("--margin", ro.margin, "Zero table radius multiplier")
      ->capture_default_str();
  rec->add_option("--threads", ro.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  rec->add_flag("--refresnel", ro.refresnel,
                "Rescale to the next odd Fresnel number first");
  rec->add_option("--truth", ro.truth, "Phantom JSON used for error metrics");
  rec->add_option("--out", ro.out, "Output directory")->capture_default_str();

  VerifyOptions vo;
  auto* ver = app.add_subcommand("verify", "Run the generating-function validation suite");
  ver->add_option("--fresnel", vo.fresnel, "Comma-separated Fresnel numbers")
      ->capture_default_str();
  ver->add_option("--kinds", vo.kinds, "phase, attenuation or both")
      ->capture_default_str();
  ver->add_option("--count", vo.count, "Zeros per table")->capture_default_str();
  ver->add_option("--sine-H", vo.sine_h, "Strip half-width")->capture_default_str();
  ver->add_option("--scan-upper", vo.scan_upper, "Bisection scan range (0, x]")
      ->capture_default_str();
  ver->add_option("--report", vo.report, "JSON report path");
  ver->add_option("--out", vo.out, "Output directory for the run manifest");
  ver->add_flag("--inject-fault", vo.inject_fault, "Corrupt one table entry")
      ->group("");

  WksOptions wo;
  auto* wks = app.add_subcommand("wks-demo", "Shannon series truncation benchmark");
  wks->add_option("--n", wo.n, "Truncation order N")->capture_default_str();
  wks->add_flag("--literal", wo.literal,
                "Use the two-band set [-1,-2/3] u [2/3,1] at face value");
  wks->add_option("--t-max", wo.t_max, "Grid half-width")->capture_default_str();
  wks->add_option("--step", wo.step, "Grid step")->capture_default_str();
  wks->add_option("--out", wo.out, "Output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*zeros) return cmd_zeros(zo, out);
    if (*sim) return cmd_simulate(so, out);
    if (*rec) return cmd_reconstruct(ro, out);
    if (*ver) return cmd_verify(vo, out);
    if (*wks) return cmd_wks(wo, out);
  } catch (const VerificationFailed& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const ConstructionError& e) {
    err << "construction error: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace ctfpw::cli
