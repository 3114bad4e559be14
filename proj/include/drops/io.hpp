#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "drops/core.hpp"
#include "drops/profile.hpp"
#include "drops/quadrature.hpp"
#include "drops/stability.hpp"

namespace drops::io {

using nlohmann::json;

inline constexpr const char* kSchema = "drop-moduli/1";

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Non-finite values have no JSON literal; they are written as strings.
inline json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt17(v);
}

inline json document(const std::string& command) { return json{{"schema", kSchema}, {"command", command}}; }

inline json to_json(const DropParams& p) { return {{"a", num(p.a)}, {"lambda0", num(p.lambda0)}, {"C", num(p.C)}}; }

inline json to_json(const Band& b) {
  return {{"r_lo", num(b.r_lo)}, {"r_hi", num(b.r_hi)}, {"mult_lo", b.mult_lo}, {"mult_hi", b.mult_hi}};
}

inline json to_json(const CriticalLevel& c) {
  return {{"i", c.index}, {"r", num(c.r)}, {"R", num(c.R)}, {"C", num(c.C)}};
}

inline json critical_levels_json(const DropParams& p) {
  json arr = json::array();
  if (p.lambda0 == 0.0) {
    arr.push_back({{"i", 0}, {"C", num(case_one_level())}, {"r", num(std::pow(2.0, 2.0 / 3.0))}});
  } else if (p.a != 0.0) {
    for (const auto& c : critical_levels(p.a)) arr.push_back(to_json(c));
  }
  return arr;
}

inline json to_json(const ClassLabel& l) {
  json roots = json::array();
  for (const auto& r : l.roots) roots.push_back({num(r.r), r.multiplicity});
  json bands = json::array();
  for (const auto& b : l.bands) bands.push_back(to_json(b));
  json radii = json::array();
  for (double r : l.circle_radii) radii.push_back(num(r));
  json out = {{"params", to_json(l.params)},
              {"region", std::string(to_string(l.region))},
              {"case", std::string(to_string(l.tag))},
              {"roots", roots},
              {"bands", bands},
              {"circle_radii", radii}};
  if (!l.note.empty()) out["note"] = l.note;
  return out;
}

inline json to_json(const SymmetryType& s) {
  switch (s.kind) {
    case SymmetryKind::Rational:
      return {{"kind", "Rational"}, {"ratio", {{"num", s.m}, {"den", s.k}, {"of", "2pi"}}}, {"group_order", s.order}};
    case SymmetryKind::Irrational: return {{"kind", "Irrational"}};
    case SymmetryKind::Exceptional: return {{"kind", "Exceptional"}};
  }
  return {};
}

inline json to_json(const Verdict& v) {
  return {{"rule", v.rule}, {"outcome", v.outcome}, {"h_range", {num(v.h_lo), num(v.h_hi)}}, {"detail", v.detail}};
}

inline json to_json(const StabilityReport& r) {
  json mu = json::array();
  for (double m : r.mu) mu.push_back(num(m));
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  json bounds = json::array();
  for (const auto& b : r.h_max_bounds) bounds.push_back({{"rule", b.rule}, {"h_max", num(b.h_max)}});
  return {{"problem", std::string(to_string(r.problem))},
          {"h", num(r.h)},
          {"mu", mu},
          {"J", r.J},
          {"morse_index_lower_bound", r.morse_index_lower_bound},
          {"verdicts", verdicts},
          {"h_max_bounds", bounds},
          {"notes", r.notes},
          {"overall", r.overall}};
}

inline json error_json(const std::string& code, const std::string& message) {
  return {{"schema", kSchema}, {"error", {{"code", code}, {"message", message}}}};
}

inline constexpr const char* kCurveHeader = "s,x,y,theta,xi1,xi2,kappa";

inline void write_curve_csv(std::ostream& os, const CurveSamples& samples) {
  os << kCurveHeader << '\n';
  for (const auto& c : samples) {
    os << fmt17(c.s) << ',' << fmt17(c.x) << ',' << fmt17(c.y) << ',' << fmt17(c.theta) << ',' << fmt17(c.xi1) << ','
       << fmt17(c.xi2) << ',' << fmt17(c.kappa) << '\n';
  }
}

/// Inverse of write_curve_csv. Throws InvalidParams on anything malformed.
inline CurveSamples read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DropError(ErrorCode::InvalidParams, "empty curve CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCurveHeader) throw DropError(ErrorCode::InvalidParams, "unexpected CSV header: " + line);
  CurveSamples out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[7];
    std::size_t pos = 0;
    for (int k = 0; k < 7; ++k) {
      const std::size_t end = line.find(',', pos);
      if ((k < 6) == (end == std::string::npos))
        throw DropError(ErrorCode::InvalidParams, "line " + std::to_string(lineno) + ": expected 7 fields");
      const std::string field = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      try {
        std::size_t used = 0;
        v[k] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw DropError(ErrorCode::InvalidParams, "line " + std::to_string(lineno) + ": bad number '" + field + "'");
      }
      pos = end + 1;
    }
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  if (out.size() < 2) throw DropError(ErrorCode::InvalidParams, "curve CSV needs at least two samples");
  return out;
}

struct SvgOverlay {
  double radius;
  bool dashed;
};

/// Single polyline path in a square viewBox padded by 5%, stroke 0.5% of the extent.
/// Overlay circles are centred on the origin.
inline std::string render_svg(const CurveSamples& samples, const std::vector<SvgOverlay>& overlays = {}) {
  double xmin = samples.front().x, xmax = xmin, ymin = samples.front().y, ymax = ymin;
  for (const auto& c : samples) {
    xmin = std::min(xmin, c.x);
    xmax = std::max(xmax, c.x);
    ymin = std::min(ymin, c.y);
    ymax = std::max(ymax, c.y);
  }
  for (const auto& o : overlays) {
    xmin = std::min(xmin, -o.radius);
    xmax = std::max(xmax, o.radius);
    ymin = std::min(ymin, -o.radius);
    ymax = std::max(ymax, o.radius);
  }
  double side = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double pad = 0.05 * side;
  const double stroke = 0.005 * side;
  side += 2.0 * pad;
  // y is flipped so the picture has the usual orientation.
  const double vx = cx - side / 2;
  const double vy = -cy - side / 2;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt17(vx) << ' ' << fmt17(vy) << ' ' << fmt17(side)
     << ' ' << fmt17(side) << "\">\n";
  for (const auto& o : overlays) {
    os << "<circle cx=\"0\" cy=\"0\" r=\"" << fmt17(o.radius) << "\" fill=\"none\" stroke=\"#888\" stroke-width=\""
       << fmt17(stroke / 2) << '"';
    if (o.dashed) os << " stroke-dasharray=\"" << fmt17(4 * stroke) << ' ' << fmt17(3 * stroke) << '"';
    os << "/>\n";
  }
  os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << fmt17(stroke) << "\" stroke-linejoin=\"round\" d=\"";
  for (std::size_t i = 0; i < samples.size(); ++i)
    os << (i == 0 ? "M" : " L") << fmt17(samples[i].x) << ',' << fmt17(-samples[i].y);
  const auto& f = samples.front();
  const auto& b = samples.back();
  if (samples.size() > 2 && std::hypot(f.x - b.x, f.y - b.y) <= 1e-9 * side) os << " Z";
  os << "\"/>\n</svg>\n";
  return os.str();
}

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 1;

  double at(std::size_t i) const {
    if (n <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
};

struct ScanGrid {
  Axis a;
  Axis C;
  double lambda0 = 1.0;
  double sym_tol = 1e-6;
  long max_denominator = 64;
};

struct ScanCell {
  double a = 0.0;
  double C = 0.0;
  std::string region;
  std::string tag;
  std::size_t root_count = 0;
  std::string roots;  // r:multiplicity pairs
  std::vector<double> delta_theta;  // per band, NaN for divergent bands
  std::string symmetry;
  std::string error;
};

inline ScanCell scan_cell(double a, double C, const ScanGrid& g) {
  ScanCell cell;
  cell.a = a;
  cell.C = C;
  try {
    const auto label = classify({a, g.lambda0, C});
    cell.region = std::string(to_string(label.region));
    cell.tag = std::string(to_string(label.tag));
    cell.root_count = label.roots.size();
    for (std::size_t i = 0; i < label.roots.size(); ++i)
      cell.roots += (i ? ";" : "") + fmt17(label.roots[i].r) + ":" + std::to_string(label.roots[i].multiplicity);
    for (const auto& b : label.bands) {
      if (!(b.width() > 0.0)) continue;
      cell.delta_theta.push_back(try_delta_theta(label.params, b).delta_theta);
    }
    if (!cell.delta_theta.empty()) {
      const auto sym = symmetry_type(cell.delta_theta.front(), g.sym_tol, g.max_denominator);
      switch (sym.kind) {
        case SymmetryKind::Rational: cell.symmetry = std::to_string(sym.m) + "/" + std::to_string(sym.k); break;
        case SymmetryKind::Irrational: cell.symmetry = "irrational"; break;
        case SymmetryKind::Exceptional: cell.symmetry = "exceptional"; break;
      }
    }
  } catch (const DropError& e) {
    cell.error = std::string(to_string(e.code()));
  }
  return cell;
}

/// Cells in (a, C) row-major order. Workers pull cells from a shared counter;
/// results land in fixed slots so the order never depends on scheduling.
inline std::vector<ScanCell> scan(const ScanGrid& g, unsigned threads = 0) {
  const std::size_t total = g.a.n * g.C.n;
  std::vector<ScanCell> cells(total);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) cells[i] = scan_cell(g.a.at(i / g.C.n), g.C.at(i % g.C.n), g);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return cells;
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells) {
  os << "a,C,region,case,root_count,roots,delta_theta_1,delta_theta_2,symmetry,error\n";
  for (const auto& c : cells) {
    os << fmt17(c.a) << ',' << fmt17(c.C) << ',' << c.region << ',' << c.tag << ',' << c.root_count << ',' << c.roots
       << ',';
    for (std::size_t k = 0; k < 2; ++k) {
      if (k < c.delta_theta.size()) os << (std::isnan(c.delta_theta[k]) ? "divergent" : fmt17(c.delta_theta[k]));
      os << ',';
    }
    os << c.symmetry << ',' << c.error << '\n';
  }
}

}  // namespace drops::io
