#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <tuple>
#include <vector>

#include "drops/drops.hpp"

namespace support {

using namespace drops;

// Bisection on a sign change of f; independent of the library's root finders.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Δθ̃ by plain midpoint sums in t after r = r_lo + w sin^2 t, using q itself
// (no deflation): √q = w sin t cos t √(-q / ((r-r_lo)(r-r_hi))).
inline double midpoint_delta_theta(const DropParams& p, double r_lo, double r_hi, int n = 200000) {
  const double w = r_hi - r_lo;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * (kPi / 2) / n;
    const double s = std::sin(t), c = std::cos(t);
    const double r = r_lo + w * s * s;
    const double q = -16 * p.C * p.C + (64 + 32 * p.C * p.lambda0) * r +
                     (-16 * p.lambda0 * p.lambda0 - 8 * p.a * p.C) * r * r + 8 * p.a * p.lambda0 * r * r * r -
                     p.a * p.a * r * r * r * r;
    const double dr_dt = 2 * w * s * c;
    acc += (4 * p.C + p.a * r * r - 4 * p.lambda0 * r) / (r * std::sqrt(q)) * dr_dt;
  }
  return acc * (kPi / 2) / n;
}

struct Closed {
  DropParams p;
  Band band;
  FundamentalPiece piece;
  SymmetryType sym;
  ProfileCurve curve;
};

inline Closed close_band(const DropParams& params, std::size_t band_index, std::size_t samples) {
  Closed out;
  const auto label = classify(params);
  out.p = label.params;
  out.band = label.bands.at(band_index);
  TraceOptions opt;
  opt.samples = samples;
  out.piece = fundamental_piece(out.p, out.band, opt);
  out.sym = symmetry_type(out.piece.delta_theta_measured, 1e-6, 64);
  out.curve = assemble_curve(out.piece, out.sym);
  return out;
}

// Closed curve on the single band above C3 with Δθ̃ = 2π/m (0 < a < 8/27).
inline Closed rational_equilibrium(double a, int m, std::size_t samples = 128) {
  const double C1 = critical_level(a, 1).C;
  const double C3 = critical_level(a, 3).C;
  const double C = find_level_for_angle(a, 1.0, C3 + 1e-6, C1 - 1e-7, 2 * kPi / m, 0);
  return close_band({a, 1.0, C}, 0, samples);
}

// Case I closed curve with Δθ̃ = target. The angle jumps by 2π at C = 0, so
// negative targets live on C < 0 and positive ones on C > 0.
inline Closed case_one_equilibrium(double target, std::size_t samples = 128) {
  const double lo = target < 0.0 ? case_one_level() + 1e-6 : 1e-3;
  const double hi = target < 0.0 ? -1e-3 : 8.0;
  const double C = find_level_for_angle(-1.0, 0.0, lo, hi, target, 0);
  return close_band({-1.0, 0.0, C}, 0, samples);
}

// Curves shared by several tests; built once per process.
inline const std::vector<Closed>& embedded_equilibria() {
  static const std::vector<Closed> v = [] {
    std::vector<Closed> out;
    for (auto [a, m] : std::vector<std::pair<double, int>>{{0.2, 4}, {0.2, 5}, {0.25, 4}, {0.25, 5}, {0.15, 4}})
      out.push_back(rational_equilibrium(a, m));
    return out;
  }();
  return v;
}

inline const std::vector<Closed>& closed_equilibria() {
  static const std::vector<Closed> v = [] {
    std::vector<Closed> out = embedded_equilibria();
    out.push_back(rational_equilibrium(0.2, 6));
    out.push_back(rational_equilibrium(0.25, 7));
    out.push_back(rational_equilibrium(0.1, 5));
    out.push_back(case_one_equilibrium(-1.2 * kPi));
    out.push_back(case_one_equilibrium(kPi / 2));
    return out;
  }();
  return v;
}

// All-pairs crossing count on the raw double coordinates.
inline std::size_t brute_force_crossings(const CurveSamples& s) {
  auto cross = [](double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  };
  const std::size_t n = s.size() - 1;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const auto &a = s[i], &b = s[i + 1], &c = s[j], &d = s[j + 1];
      const double d1 = cross(a.x, a.y, b.x, b.y, c.x, c.y);
      const double d2 = cross(a.x, a.y, b.x, b.y, d.x, d.y);
      const double d3 = cross(c.x, c.y, d.x, d.y, a.x, a.y);
      const double d4 = cross(c.x, c.y, d.x, d.y, b.x, b.y);
      if (d1 * d2 < 0 && d3 * d4 < 0) ++count;
    }
  }
  return count;
}

inline std::vector<double> column(const CurveSamples& s, double CurveSample::*m) {
  std::vector<double> out;
  for (const auto& c : s) out.push_back(c.*m);
  return out;
}

}  // namespace support
