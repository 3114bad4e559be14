// drops: command-line front end for the drops library.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "drops/drops.hpp"

namespace {

using drops::DropError;
using drops::ErrorCode;
using drops::io::json;

struct Config {
  double a = 0.0;
  double lambda0 = 1.0;
  double C = 0.0;
  int band = 1;  // 1-based
  double h = 1.0;
  std::string problem = "free";
  std::string out;
  std::string in;
  std::string format = "json";
  double tol = 1e-6;
  long max_denominator = 64;
  int pieces = 0;  // 0: as many as the symmetry needs
  std::string grid;
  std::size_t samples = 512;
  double max_arclength = 200.0;
  unsigned threads = 0;
  int round = 0;  // 1-based index into circle radii; 0: off
  bool overlay = false;
  double limit_R = 0.0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + cfg.out);
  f << text;
}

drops::DropParams params(const Config& c) { return {c.a, c.lambda0, c.C}; }

const drops::Band& pick_band(const drops::ClassLabel& label, int band) {
  if (label.bands.empty()) throw DropError(ErrorCode::WrongRegion, "no band at this level");
  if (band < 1 || static_cast<std::size_t>(band) > label.bands.size())
    throw UsageError("--band must be between 1 and " + std::to_string(label.bands.size()));
  return label.bands[static_cast<std::size_t>(band - 1)];
}

json radii_json(const drops::DropParams& p) {
  json arr = json::array();
  for (const auto& c : drops::circle_radii(p))
    arr.push_back({{"R", drops::io::num(c.R)}, {"orientation", c.orientation}, {"multiplicity", c.multiplicity}});
  return arr;
}

std::string cmd_classify(const Config& cfg) {
  const auto p = params(cfg);
  const auto label = drops::classify(p);
  json doc = drops::io::document("classify");
  doc.update(drops::io::to_json(label));
  doc["round_solutions"] = radii_json(p);
  doc["critical_levels"] = drops::io::critical_levels_json(p);
  return doc.dump(2) + "\n";
}

std::string cmd_critical(const Config& cfg) {
  const drops::DropParams p{cfg.a, cfg.lambda0, 0.0};
  drops::require_canonical(p);
  json doc = drops::io::document("critical");
  doc["a"] = drops::io::num(cfg.a);
  doc["lambda0"] = drops::io::num(cfg.lambda0);
  doc["critical_levels"] = drops::io::critical_levels_json(p);
  json limits = json::array();
  if (cfg.lambda0 == 0.0) {
    limits.push_back({{"branch", 0}, {"limit", drops::io::num(drops::limit_delta_theta(cfg.a, 0, 0.0))}, {"side", 1}});
  } else if (cfg.a != 0.0) {
    for (int br = 1; br <= 2; ++br) {
      try {
        limits.push_back({{"branch", br},
                          {"limit", drops::io::num(drops::limit_delta_theta(cfg.a, br, cfg.lambda0))},
                          {"side", drops::limit_side(cfg.a, br, cfg.lambda0)}});
      } catch (const DropError& e) {
        if (e.code() != ErrorCode::BranchUndefined) throw;
      }
    }
  }
  doc["delta_theta_limits"] = limits;
  return doc.dump(2) + "\n";
}

std::string cmd_delta_theta(const Config& cfg, bool band_given) {
  const auto label = drops::classify(params(cfg));
  json doc = drops::io::document("delta-theta");
  doc["params"] = drops::io::to_json(label.params);
  doc["region"] = std::string(drops::to_string(label.region));
  json bands = json::array();
  for (std::size_t i = 0; i < label.bands.size(); ++i) {
    if (band_given && static_cast<int>(i + 1) != cfg.band) continue;
    const auto& b = label.bands[i];
    json row = {{"band", i + 1}, {"interval", drops::io::to_json(b)}};
    const auto r = drops::try_delta_theta(label.params, b);
    row["convergent"] = r.convergent;
    if (r.convergent) {
      row["delta_theta"] = drops::io::num(r.delta_theta);
      row["est_error"] = drops::io::num(r.est_error);
      row["arc_length"] = drops::io::num(drops::arc_length(label.params, b));
      row["symmetry"] = drops::io::to_json(drops::symmetry_type(r.delta_theta, cfg.tol, cfg.max_denominator));
    } else {
      row["delta_theta"] = "divergent";
      row["symmetry"] = {{"kind", "Exceptional"}};
    }
    bands.push_back(row);
  }
  if (band_given && bands.empty()) pick_band(label, cfg.band);
  doc["bands"] = bands;
  return doc.dump(2) + "\n";
}

struct TraceResult {
  json summary;
  drops::CurveSamples samples;
  std::vector<drops::io::SvgOverlay> overlays;
};

TraceResult trace(const Config& cfg) {
  const auto label = drops::classify(params(cfg));
  const auto& p = label.params;
  TraceResult res;
  json& s = res.summary;
  s = drops::io::document("trace");
  s["params"] = drops::io::to_json(p);
  s["region"] = std::string(drops::to_string(label.region));
  s["case"] = std::string(drops::to_string(label.tag));
  drops::TraceOptions opt;
  opt.samples = cfg.samples;

  if (label.bands.empty() && !label.circle_radii.empty()) {
    const double r = label.circle_radii.front();
    // The circle's TreadmillSled point is (0, xi2) on the level set.
    const double xi2 = drops::xi2_of_r(r * r, p);
    const auto curve = drops::circle_curve(p, -xi2, cfg.samples, opt);
    res.samples = curve.samples;
    s["round"] = true;
    s["radius"] = drops::io::num(r);
    s["length"] = drops::io::num(curve.length());
    s["closed"] = true;
    s["embedded"] = drops::is_embedded(curve);
    s["samples"] = res.samples.size();
    return res;
  }

  const auto& band = pick_band(label, cfg.band);
  s["band"] = drops::io::to_json(band);
  if (!band.simple()) {
    const auto ex = drops::trace_exceptional(p, band, cfg.max_arclength, 0.01, opt);
    res.samples = ex.samples;
    s["exceptional"] = true;
    s["limit_R"] = drops::io::num(ex.limit_R);
    s["double_root_R"] = drops::io::num(ex.target_R);
    s["truncated"] = ex.truncated;
    s["length"] = drops::io::num(ex.samples.back().s);
    s["samples"] = res.samples.size();
    res.overlays.push_back({ex.limit_R, true});
    return res;
  }

  const auto piece = drops::fundamental_piece(p, band, opt);
  const auto sym = drops::symmetry_type(piece.delta_theta_measured, cfg.tol, cfg.max_denominator);
  s["exceptional"] = false;
  s["delta_theta"] = drops::io::num(piece.delta_theta_measured);
  s["delta_theta_quadrature"] = drops::io::num(drops::delta_theta(p, band).delta_theta);
  s["piece_length"] = drops::io::num(piece.length);
  s["r_min"] = drops::io::num(piece.r_min);
  s["r_max"] = drops::io::num(piece.r_max);
  s["symmetry"] = drops::io::to_json(sym);

  drops::ProfileCurve curve;
  const bool rational = sym.kind == drops::SymmetryKind::Rational;
  if (rational && (cfg.pieces == 0 || cfg.pieces == sym.order)) {
    curve = drops::assemble_curve(piece, sym);
  } else {
    const auto n = static_cast<std::size_t>(cfg.pieces > 0 ? cfg.pieces : 1);
    curve = drops::assemble_copies(piece, n, piece.delta_theta_measured);
  }
  res.samples = curve.samples;
  s["pieces"] = curve.pieces;
  s["closed"] = curve.closed;
  if (curve.closed) {
    try {
      s["embedded"] = drops::is_embedded(curve);
    } catch (const DropError& e) {
      s["embedded"] = "undetermined";
    }
  }
  s["samples"] = res.samples.size();
  res.overlays.push_back({std::sqrt(piece.r_min), false});
  res.overlays.push_back({std::sqrt(piece.r_max), false});
  return res;
}

std::string cmd_trace(const Config& cfg) {
  auto res = trace(cfg);
  const std::string summary = res.summary.dump(2) + "\n";
  if (cfg.format == "json") return summary;
  std::string body;
  if (cfg.format == "svg") {
    body = drops::io::render_svg(res.samples, res.overlays);
  } else {
    std::ostringstream os;
    drops::io::write_curve_csv(os, res.samples);
    body = os.str();
  }
  if (cfg.out.empty()) {
    std::cerr << summary;
    return body;
  }
  std::cout << summary;
  return body;
}

drops::io::Axis parse_axis(const std::string& spec) {
  drops::io::Axis ax;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  long n = 0;
  if (!(is >> ax.lo >> c1 >> ax.hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !is.eof())
    throw UsageError("axis must be lo:hi:n, got '" + spec + "'");
  if (n == 1 && ax.hi != ax.lo) throw UsageError("a single-point axis needs lo == hi");
  if (ax.hi < ax.lo) throw UsageError("axis range is empty: " + spec);
  ax.n = static_cast<std::size_t>(n);
  return ax;
}

std::string cmd_scan(const Config& cfg) {
  const auto comma = cfg.grid.find(',');
  if (comma == std::string::npos) throw UsageError("--grid must be a0:a1:na,C0:C1:nC");
  drops::io::ScanGrid g;
  g.a = parse_axis(cfg.grid.substr(0, comma));
  g.C = parse_axis(cfg.grid.substr(comma + 1));
  g.lambda0 = cfg.lambda0;
  g.sym_tol = cfg.tol;
  g.max_denominator = cfg.max_denominator;
  if (g.lambda0 != 1.0 && !(g.lambda0 == 0.0 && g.a.lo == -1.0 && g.a.hi == -1.0))
    throw UsageError("scan needs lambda0 = 1, or lambda0 = 0 with a fixed at -1");
  const auto cells = drops::io::scan(g, cfg.threads);
  std::ostringstream os;
  drops::io::write_scan_csv(os, cells);
  return os.str();
}

std::string cmd_stability(const Config& cfg) {
  drops::Problem problem = cfg.problem == "fixed" ? drops::Problem::Fixed : drops::Problem::Free;
  if (!(cfg.h > 0.0)) throw UsageError("--h must be positive");
  const auto p = params(cfg);
  json doc = drops::io::document("stability");
  std::optional<double> radius;
  if (cfg.round > 0) {
    const auto radii = drops::circle_radii(p);
    if (static_cast<std::size_t>(cfg.round) > radii.size())
      throw UsageError("--round must be between 1 and " + std::to_string(radii.size()));
    radius = radii[static_cast<std::size_t>(cfg.round - 1)].R;
    doc["params"] = {{"a", drops::io::num(p.a)}, {"lambda0", drops::io::num(p.lambda0)}};
  } else {
    const auto label = drops::classify(p);
    doc["params"] = drops::io::to_json(label.params);
    doc["region"] = std::string(drops::to_string(label.region));
    if (label.bands.empty() && !label.circle_radii.empty()) radius = label.circle_radii.front();
    if (!radius) {
      const auto& band = pick_band(label, cfg.band);
      if (!band.simple()) throw DropError(ErrorCode::Exceptional, "exceptional band has no closed profile curve");
      drops::TraceOptions opt;
      opt.samples = cfg.samples;
      const auto piece = drops::fundamental_piece(label.params, band, opt);
      const auto sym = drops::symmetry_type(piece.delta_theta_measured, cfg.tol, cfg.max_denominator);
      const auto curve = drops::assemble_curve(piece, sym);
      drops::StabilityInputs in;
      in.n_modes = static_cast<std::size_t>(2 * sym.order + 4);
      doc["round"] = false;
      doc["symmetry"] = drops::io::to_json(sym);
      doc["report"] = drops::io::to_json(drops::stability_report(curve, label.params, cfg.h, problem, in));
      return doc.dump(2) + "\n";
    }
  }
  doc["round"] = true;
  doc["radius"] = drops::io::num(*radius);
  doc["report"] = drops::io::to_json(drops::round_cylinder_report(p.a, p.lambda0, *radius, cfg.h, problem));
  return doc.dump(2) + "\n";
}

std::string cmd_render(const Config& cfg) {
  std::ifstream f(cfg.in, std::ios::binary);
  if (!f) throw UsageError("cannot read " + cfg.in);
  drops::CurveSamples samples;
  try {
    samples = drops::io::read_curve_csv(f);
  } catch (const DropError& e) {
    throw UsageError(e.what());
  }
  std::vector<drops::io::SvgOverlay> overlays;
  if (cfg.overlay) {
    double rmin = samples.front().r(), rmax = rmin;
    for (const auto& c : samples) {
      rmin = std::min(rmin, c.r());
      rmax = std::max(rmax, c.r());
    }
    overlays.push_back({std::sqrt(rmin), false});
    overlays.push_back({std::sqrt(rmax), false});
  }
  if (cfg.limit_R > 0.0) overlays.push_back({cfg.limit_R, true});
  return drops::io::render_svg(samples, overlays);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cylindrical rotating drops: classification, tracing, stability"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");
  Config cfg;
  bool band_given = false;

  auto add_params = [&](CLI::App* sub, bool need_C) {
    sub->add_option("--a", cfg.a, "rotation coefficient")->required();
    sub->add_option("--lambda0", cfg.lambda0, "Lagrange multiplier (0 or 1)")->check(CLI::IsMember({0.0, 1.0}));
    auto* c = sub->add_option("--C", cfg.C, "Hamiltonian level");
    if (need_C) c->required();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "output file (default stdout)"); };
  auto add_sym = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "tolerance for rational symmetry detection")->check(CLI::PositiveNumber);
    sub->add_option("--max-denominator", cfg.max_denominator, "largest symmetry order considered")
        ->check(CLI::Range(1L, 1000000L));
  };

  auto add_json_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json"}));
  };

  auto* classify = app.add_subcommand("classify", "region, roots and bands of q");
  add_params(classify, true);
  add_json_format(classify);
  add_out(classify);

  auto* critical = app.add_subcommand("critical", "critical levels C_i(a) and Δθ̃ limits");
  add_params(critical, false);
  add_json_format(critical);
  add_out(critical);

  auto* dtheta = app.add_subcommand("delta-theta", "Δθ̃ and arc length per band");
  add_params(dtheta, true);
  dtheta->add_option("--band", cfg.band, "band number (default all)")->check(CLI::PositiveNumber);
  add_sym(dtheta);
  add_json_format(dtheta);
  add_out(dtheta);

  auto* trace = app.add_subcommand("trace", "trace and assemble the profile curve");
  add_params(trace, true);
  trace->add_option("--band", cfg.band, "band number")->check(CLI::PositiveNumber);
  trace->add_option("--pieces", cfg.pieces, "fundamental pieces to assemble (default: symmetry order)")
      ->check(CLI::NonNegativeNumber);
  trace->add_option("--samples", cfg.samples, "samples per fundamental piece")->check(CLI::Range(8, 1 << 20));
  trace->add_option("--max-arclength", cfg.max_arclength, "trace length for exceptional bands")
      ->check(CLI::PositiveNumber);
  trace->add_option("--format", cfg.format, "json summary, csv samples or svg drawing")
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  add_sym(trace);
  add_out(trace);

  auto* scan = app.add_subcommand("scan", "classify and measure Δθ̃ over an (a, C) grid");
  scan->add_option("--grid", cfg.grid, "a0:a1:na,C0:C1:nC")->required();
  scan->add_option("--lambda0", cfg.lambda0, "Lagrange multiplier (0 or 1)")->check(CLI::IsMember({0.0, 1.0}));
  scan->add_option("--threads", cfg.threads, "worker threads (default: hardware)");
  scan->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv"}));
  add_sym(scan);
  add_out(scan);

  auto* stability = app.add_subcommand("stability", "stability report for a closed profile curve or round cylinder");
  add_params(stability, false);
  stability->add_option("--band", cfg.band, "band number")->check(CLI::PositiveNumber);
  stability->add_option("--h", cfg.h, "cylinder height")->check(CLI::PositiveNumber);
  stability->add_option("--problem", cfg.problem, "free or fixed boundary")->check(CLI::IsMember({"free", "fixed"}));
  stability->add_option("--round", cfg.round, "use round solution number i of a R^3 - 2 lambda0 R + 2")
      ->check(CLI::PositiveNumber);
  stability->add_option("--samples", cfg.samples, "samples per fundamental piece")->check(CLI::Range(32, 1 << 14));
  add_sym(stability);
  add_json_format(stability);
  add_out(stability);

  auto* render = app.add_subcommand("render", "draw a traced curve CSV as SVG");
  render->add_option("--in", cfg.in, "curve CSV written by trace")->required();
  render->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"svg"}));
  render->add_flag("--overlay", cfg.overlay, "draw circles at the smallest and largest radius");
  render->add_option("--limit-R", cfg.limit_R, "dashed circle of this radius")->check(CLI::PositiveNumber);
  add_out(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << drops::io::error_json("UsageError", e.what()).dump() << "\n";
    return 2;
  }

  band_given = dtheta->count("--band") > 0;
  if (*trace && trace->count("--format") == 0) cfg.format = "csv";
  try {
    std::string text;
    if (*classify) text = cmd_classify(cfg);
    else if (*critical) text = cmd_critical(cfg);
    else if (*dtheta) text = cmd_delta_theta(cfg, band_given);
    else if (*trace) text = cmd_trace(cfg);
    else if (*scan) text = cmd_scan(cfg);
    else if (*stability) text = cmd_stability(cfg);
    else if (*render) text = cmd_render(cfg);
    emit(cfg, text);
  } catch (const UsageError& e) {
    std::cerr << drops::io::error_json("UsageError", e.what()).dump() << "\n";
    return 2;
  } catch (const DropError& e) {
    std::cerr << drops::io::error_json(std::string(drops::to_string(e.code())), e.what()).dump() << "\n";
    return e.code() == ErrorCode::InvalidParams ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << drops::io::error_json("Internal", e.what()).dump() << "\n";
    return 1;
  }
  return 0;
}
