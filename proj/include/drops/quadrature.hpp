#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "drops/core.hpp"

namespace drops {

struct TSPoint {
  double xi1;
  double xi2;
};

/// Right half of the level set parametrized by r = xi1^2 + xi2^2.
inline TSPoint rho(double r, const DropParams& p) {
  const auto q = build_q(p);
  const double v = q(r);
  if (v < -1e-9 * std::max(1.0, q.magnitude(r)))
    throw DropError(ErrorCode::OutsideBand, "q(" + std::to_string(r) + ") = " + std::to_string(v) + " < 0");
  return {std::sqrt(std::max(v, 0.0)) / 8.0, xi2_of_r(r, p)};
}

struct AngleResult {
  double delta_theta = std::numeric_limits<double>::quiet_NaN();
  double est_error = 0.0;
  bool convergent = false;
};

struct QuadratureOptions {
  double tol = 1e-12;
  unsigned max_depth = 18;
};

namespace detail {

/// q / ((r - r_lo)(r - r_hi)), negated so that it is positive on the band.
inline Polynomial band_cofactor(const QuarticQ& q, const Band& b) {
  Polynomial s = q.poly().deflate(b.r_lo).deflate(b.r_hi);
  std::vector<double> c(s.coefficients().begin(), s.coefficients().end());
  for (auto& x : c) x = -x;
  return Polynomial(std::move(c));
}

inline void check_band(const Band& b) {
  if (!(b.width() > 0.0)) throw DropError(ErrorCode::Degenerate, "band has zero width");
}

// Integrates g(t) over [0, pi/2] with the 61-point rule; the error estimate is
// the larger of the adaptive estimate and the gap to the 31-point rule.
template <class F>
std::pair<double, double> integrate_quarter(F g, const QuadratureOptions& opt) {
  using boost::math::quadrature::gauss_kronrod;
  double err61 = 0.0;
  double err31 = 0.0;
  const double v61 = gauss_kronrod<double, 61>::integrate(g, 0.0, kPi / 2, opt.max_depth, opt.tol, &err61);
  const double v31 = gauss_kronrod<double, 31>::integrate(g, 0.0, kPi / 2, opt.max_depth, opt.tol, &err31);
  return {v61, std::max(err61, std::abs(v61 - v31))};
}

}  // namespace detail

/// Δθ̃ over a band, or convergent = false when an endpoint is a multiple root.
inline AngleResult try_delta_theta(const DropParams& p, const Band& band, const QuadratureOptions& opt = {}) {
  AngleResult out;
  if (!band.simple()) return out;
  detail::check_band(band);
  if (band.r_lo == 0.0 && p.C != 0.0) throw DropError(ErrorCode::IntegrandPole, "band starts at r = 0 with C != 0");
  const auto q = build_q(p);
  const auto cof = detail::band_cofactor(q, band);
  const double w = band.width();
  auto g = [&](double t) {
    const double s = std::sin(t);
    const double r = band.r_lo + w * s * s;
    const double f = (p.C == 0.0 ? 0.0 : 4.0 * p.C / r) + p.a * r - 4.0 * p.lambda0;
    return 2.0 * f / std::sqrt(cof(r));
  };
  const auto [v, e] = detail::integrate_quarter(g, opt);
  out.delta_theta = v;
  out.est_error = e;
  out.convergent = std::isfinite(v);
  return out;
}

inline AngleResult delta_theta(const DropParams& p, const Band& band, const QuadratureOptions& opt = {}) {
  if (!band.simple()) throw DropError(ErrorCode::Divergent, "band endpoint is a multiple root");
  return try_delta_theta(p, band, opt);
}

/// Length of one fundamental piece, 16 ∫ dt / sqrt(cofactor) after r = r_lo + w sin^2 t.
inline double arc_length(const DropParams& p, const Band& band, const QuadratureOptions& opt = {}) {
  detail::check_band(band);
  if (!band.simple()) throw DropError(ErrorCode::Divergent, "band endpoint is a multiple root");
  const auto q = build_q(p);
  const auto cof = detail::band_cofactor(q, band);
  const double w = band.width();
  auto g = [&](double t) {
    const double s = std::sin(t);
    return 16.0 / std::sqrt(cof(band.r_lo + w * s * s));
  };
  return detail::integrate_quarter(g, opt).first;
}

struct BandPairCheck {
  double lhs;    // Δθ̃ on the inner band
  double rhs;    // Δθ̃ on the outer band
  double shift;  // 2π for C < 0, π at C = 0, 0 for C > 0
  double discrepancy;
};

/// Expected offset between the outer and inner band angles. At C = 0 the
/// inner band starts at the origin and sits halfway between its one-sided
/// limits.
inline double band_pair_shift(double C) {
  if (C < 0.0) return 2.0 * kPi;
  if (C > 0.0) return 0.0;
  return kPi;
}

inline BandPairCheck delta_theta_band_pair_check(const DropParams& p, const Band& band1, const Band& band2,
                                                 const QuadratureOptions& opt = {}) {
  const auto label = classify(p);
  if (label.region != Region::Omega2 || label.tag != CaseTag::TwoBands)
    throw DropError(ErrorCode::WrongRegion, "band pair identity needs four simple roots");
  BandPairCheck out{};
  out.lhs = delta_theta(p, band1, opt).delta_theta;
  out.rhs = delta_theta(p, band2, opt).delta_theta;
  out.shift = band_pair_shift(p.C);
  out.discrepancy = std::abs(out.rhs - out.lhs - out.shift);
  return out;
}

inline BandPairCheck delta_theta_band_pair_check(const DropParams& p, const QuadratureOptions& opt = {}) {
  const auto label = classify(p);
  if (label.bands.size() != 2) throw DropError(ErrorCode::WrongRegion, "band pair identity needs four simple roots");
  return delta_theta_band_pair_check(label.params, label.bands[0], label.bands[1], opt);
}

/// Closed-form limit of Δθ̃ at a critical level.
inline double limit_delta_theta(double a, int branch, double lambda0) {
  if (lambda0 == 0.0) {
    if (a != -1.0) throw DropError(ErrorCode::InvalidParams, "lambda0 = 0 requires a = -1");
    return -2.0 * kPi / std::sqrt(3.0);
  }
  if (branch != 1 && branch != 2) throw DropError(ErrorCode::BranchUndefined, "limit formula exists for branches 1 and 2");
  const auto lv = critical_level(a, branch);
  const double r = lv.r;
  const double C = lv.C;
  const double L = lambda0;
  const double A = 16.0 * L * L + 8.0 * a * C - 24.0 * a * L * r + 6.0 * a * a * r * r;
  if (!(A > 0.0)) throw DropError(ErrorCode::BranchUndefined, "limit discriminant is not positive");
  return kPi * (4.0 * C + r * (a * r - 4.0 * L)) / (r * std::sqrt(A));
}

/// Side from which C approaches C_i for the limit: +1 from above, -1 from below.
inline int limit_side(double a, int branch, double lambda0) {
  if (lambda0 == 0.0) return 1;
  if (branch == 1) return a < 0.0 ? 1 : -1;
  return 1;
}

/// Band that collapses onto the double root as C tends to the critical level.
inline Band collapsing_band(const DropParams& p, int branch) {
  const auto label = classify(p);
  if (label.bands.empty()) throw DropError(ErrorCode::WrongRegion, "no band at this level");
  if (p.lambda0 == 0.0) return label.bands.front();
  const double r_crit = critical_level(p.a, branch).r;
  const Band* best = &label.bands.front();
  for (const auto& b : label.bands) {
    const double d = std::abs(0.5 * (b.r_lo + b.r_hi) - r_crit);
    if (d < std::abs(0.5 * (best->r_lo + best->r_hi) - r_crit)) best = &b;
  }
  return *best;
}

/// Level in [C_lo, C_hi] where Δθ̃ on band number `band_index` hits target.
/// Δθ̃ - target must change sign on the bracket.
inline double find_level_for_angle(double a, double lambda0, double C_lo, double C_hi, double target,
                                   std::size_t band_index = 0, double tol = 1e-12) {
  auto f = [&](double C) {
    const DropParams p{a, lambda0, C};
    const auto label = classify(p);
    if (band_index >= label.bands.size()) throw DropError(ErrorCode::WrongRegion, "band index out of range");
    return delta_theta(label.params, label.bands[band_index]).delta_theta - target;
  };
  double flo = f(C_lo);
  const double fhi = f(C_hi);
  if ((flo > 0) == (fhi > 0)) throw DropError(ErrorCode::NotConverged, "target angle not bracketed");
  for (int it = 0; it < 200 && C_hi - C_lo > tol * (1.0 + std::abs(C_lo)); ++it) {
    const double mid = 0.5 * (C_lo + C_hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      C_lo = mid;
      flo = fm;
    } else {
      C_hi = mid;
    }
  }
  return 0.5 * (C_lo + C_hi);
}

}  // namespace drops
