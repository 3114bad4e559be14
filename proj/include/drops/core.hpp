#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drops/error.hpp"
#include "drops/polynomial.hpp"

namespace drops {

inline constexpr double kPi = 3.14159265358979323846;

/// Level-set problem: rotation coefficient a, multiplier lambda0, level C.
struct DropParams {
  double a = -1.0;
  double lambda0 = 0.0;
  double C = 0.0;
};

inline bool is_finite(const DropParams& p) {
  return std::isfinite(p.a) && std::isfinite(p.lambda0) && std::isfinite(p.C);
}

/// Either (lambda0 = 0, a = -1) or lambda0 = 1.
inline bool is_canonical(const DropParams& p) {
  if (!is_finite(p)) return false;
  if (p.lambda0 == 1.0) return true;
  return p.lambda0 == 0.0 && p.a == -1.0;
}

inline void require_canonical(const DropParams& p) {
  if (!is_finite(p)) throw DropError(ErrorCode::InvalidParams, "parameters must be finite");
  if (!is_canonical(p))
    throw DropError(ErrorCode::InvalidParams, "expected lambda0 = 1, or lambda0 = 0 with a = -1");
}

/// Parameters of the curve scaled by lam about the origin:
/// a -> lam^-3 a, lambda0 -> lambda0 / lam, C -> lam C.
inline DropParams rescale(const DropParams& p, double lam) {
  return {p.a / (lam * lam * lam), p.lambda0 / lam, p.C * lam};
}

inline double eval_G(double xi1, double xi2, const DropParams& p) {
  const double r = xi1 * xi1 + xi2 * xi2;
  return 2.0 * xi2 + p.lambda0 * r - 0.25 * p.a * r * r;
}

/// xi2 on the level set as a function of r = xi1^2 + xi2^2.
inline double xi2_of_r(double r, const DropParams& p) {
  return (4.0 * p.C + r * (-4.0 * p.lambda0 + p.a * r)) / 8.0;
}

struct QuarticQ {
  std::array<double, 5> c{};
  DropParams params;

  Polynomial poly() const { return Polynomial(std::vector<double>(c.begin(), c.end())); }

  double operator()(double r) const {
    return (((c[4] * r + c[3]) * r + c[2]) * r + c[1]) * r + c[0];
  }

  double derivative(double r) const {
    return ((4.0 * c[4] * r + 3.0 * c[3]) * r + 2.0 * c[2]) * r + c[1];
  }

  /// Σ|c_k| r^k, for scaling residual tolerances.
  double magnitude(double r) const {
    const double ar = std::abs(r);
    double acc = 0.0;
    for (int k = 4; k >= 0; --k) acc = acc * ar + std::abs(c[k]);
    return acc;
  }
};

inline QuarticQ build_q(const DropParams& p) {
  const double a = p.a;
  const double L = p.lambda0;
  const double C = p.C;
  QuarticQ q;
  q.params = p;
  q.c = {-16.0 * C * C, 64.0 + 32.0 * C * L, -16.0 * L * L - 8.0 * a * C, 8.0 * a * L, -a * a};
  return q;
}

struct Root {
  double r;
  int multiplicity;
};
using RootList = std::vector<Root>;

struct RootTolerances {
  double tol_root = 1e-8;
  double tol_mult = 1e-11;
};

/// All real roots of q, negative ones included; used to check that none exist.
inline std::vector<RealRoot> all_real_roots(const QuarticQ& q, const RootTolerances& tol = {}) {
  return merge_clusters(real_roots(q.poly(), tol.tol_mult), tol.tol_root);
}

/// Nonnegative roots of q with multiplicity. At C = 0 a root within tol_root of
/// zero is clamped to 0; otherwise a small root is Newton-polished instead.
inline RootList positive_roots(const QuarticQ& q, const RootTolerances& tol = {}) {
  RootList out;
  for (const auto& rr : all_real_roots(q, tol)) {
    double r = rr.value;
    if (r < -tol.tol_root) continue;
    if (std::abs(r) <= tol.tol_root) {
      if (q.c[0] == 0.0) {
        r = 0.0;
      } else {
        r = std::max(r, 0.0);
        for (int i = 0; i < 8 && q.derivative(r) != 0.0; ++i) r -= q(r) / q.derivative(r);
        if (r <= 0.0) continue;
      }
    }
    const double resid = std::abs(q(r));
    if (resid > 1e-6 * std::max(1.0, q.magnitude(r)))
      throw DropError(ErrorCode::IllConditioned, "root residual " + std::to_string(resid) + " at r=" + std::to_string(r));
    out.push_back({r, rr.multiplicity});
  }
  return out;
}

struct CircleRadius {
  double R;         // |root of Q|
  int orientation;  // sign of the root
  int multiplicity;
};

/// Radii of round solutions: |roots| of Q(R) = a R^3 - 2 lambda0 R + 2.
inline std::vector<CircleRadius> circle_radii(const DropParams& p) {
  require_canonical(p);
  Polynomial Q{2.0, -2.0 * p.lambda0, 0.0, p.a};
  std::vector<CircleRadius> out;
  for (const auto& rr : merge_clusters(real_roots(Q), 1e-8)) {
    if (rr.value == 0.0) continue;
    out.push_back({std::abs(rr.value), rr.value > 0 ? 1 : -1, rr.multiplicity});
  }
  return out;
}

/// Level of the round solution whose signed radius is R.
inline double circle_level(double R_signed, const DropParams& p) { return eval_G(0.0, -R_signed, p); }

/// Level C0 where the Case I level set degenerates to a point.
inline double case_one_level() { return -3.0 * std::pow(2.0, -2.0 / 3.0); }

inline constexpr double kCuspA = 8.0 / 27.0;

inline bool is_cusp_a(double a) { return std::abs(a - kCuspA) <= 1e-12; }

struct CriticalLevel {
  int index;  // 1, 2 or 3
  double r;   // R^2
  double R;   // signed root of Q
  double C;
};

namespace detail {

inline double Q_lambda1(double a, double R) { return a * R * R * R - 2.0 * R + 2.0; }

inline double bisect_Q(double a, double lo, double hi) {
  double flo = Q_lambda1(a, lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = Q_lambda1(a, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double level_formula(double a, double r) {
  return (16.0 - 8.0 * r + 6.0 * a * r * r - a * a * r * r * r) / (4.0 * (-2.0 + a * r));
}

}  // namespace detail

/// One critical level C_i(a) (lambda0 = 1).
inline CriticalLevel critical_level(double a, int i) {
  if (!std::isfinite(a) || a == 0.0) throw DropError(ErrorCode::BranchUndefined, "critical levels need a != 0");
  if (i < 1 || i > 3) throw DropError(ErrorCode::BranchUndefined, "branch index must be 1, 2 or 3");
  double R = 0.0;
  if (i == 1) {
    if (a < 0.0) {
      R = detail::bisect_Q(a, 0.0, 1.0);
    } else {
      double lo = -1.0;
      while (detail::Q_lambda1(a, lo) > 0.0) lo *= 2.0;
      R = detail::bisect_Q(a, lo, 0.0);
    }
  } else {
    if (!(a > 0.0 && (a <= kCuspA || is_cusp_a(a))))
      throw DropError(ErrorCode::BranchUndefined, "C" + std::to_string(i) + " is defined only for 0 < a <= 8/27");
    if (is_cusp_a(a)) {
      R = 1.5;
    } else if (i == 2) {
      R = detail::bisect_Q(a, 1.0, 1.5);
    } else {
      R = detail::bisect_Q(a, 1.5, 1.0 + 2.0 / a);
    }
  }
  const double r = R * R;
  double C = detail::level_formula(a, r);
  if (is_cusp_a(a)) C = (i == 1) ? 9.0 : -9.0 / 8.0;
  return {i, r, R, C};
}

/// The critical levels defined for this a: C1 always, C2 and C3 for 0 < a <= 8/27.
inline std::vector<CriticalLevel> critical_levels(double a) {
  std::vector<CriticalLevel> out;
  out.push_back(critical_level(a, 1));
  if (a > 0.0 && (a <= kCuspA || is_cusp_a(a))) {
    out.push_back(critical_level(a, 2));
    out.push_back(critical_level(a, 3));
  }
  return out;
}

struct Band {
  double r_lo = 0.0;
  double r_hi = 0.0;
  int mult_lo = 1;
  int mult_hi = 1;

  bool simple() const { return mult_lo == 1 && mult_hi == 1; }
  double width() const { return r_hi - r_lo; }
};

/// Intervals between consecutive roots on which q > 0.
inline std::vector<Band> bands_from_roots(const QuarticQ& q, const RootList& roots) {
  std::vector<Band> out;
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    const double lo = roots[i].r;
    const double hi = roots[i + 1].r;
    if (q(0.5 * (lo + hi)) > 0.0) out.push_back({lo, hi, roots[i].multiplicity, roots[i + 1].multiplicity});
  }
  return out;
}

enum class CaseTag { Empty, CircleOnly, SingleBand, TwoBands, CircleAndBand, Exceptional, ExceptionalCusp, CaseIBand, CaseICircle };
enum class Region { Omega1, Omega2, Omega3, Beta1, Beta2, Beta3, SpecialPoint, CaseISemiline, None };

inline std::string_view to_string(CaseTag t) {
  switch (t) {
    case CaseTag::Empty: return "Empty";
    case CaseTag::CircleOnly: return "CircleOnly";
    case CaseTag::SingleBand: return "SingleBand";
    case CaseTag::TwoBands: return "TwoBands";
    case CaseTag::CircleAndBand: return "CircleAndBand";
    case CaseTag::Exceptional: return "Exceptional";
    case CaseTag::ExceptionalCusp: return "ExceptionalCusp";
    case CaseTag::CaseIBand: return "CaseI-Band";
    case CaseTag::CaseICircle: return "CaseI-Circle";
  }
  return "?";
}

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::Omega1: return "Omega1";
    case Region::Omega2: return "Omega2";
    case Region::Omega3: return "Omega3";
    case Region::Beta1: return "beta1";
    case Region::Beta2: return "beta2";
    case Region::Beta3: return "beta3";
    case Region::SpecialPoint: return "special-point";
    case Region::CaseISemiline: return "caseI-semiline";
    case Region::None: return "none";
  }
  return "?";
}

struct ClassLabel {
  CaseTag tag = CaseTag::Empty;
  Region region = Region::None;
  DropParams params;  // with C snapped onto a nearby critical level
  RootList roots;
  std::vector<Band> bands;
  std::vector<double> circle_radii;
  std::string note;
};

inline constexpr double kSnapTol = 1e-10;

namespace detail {

inline CaseTag tag_from_roots(const RootList& roots, const std::vector<Band>& bands, bool case_one) {
  int max_mult = 0;
  for (const auto& r : roots) max_mult = std::max(max_mult, r.multiplicity);
  bool touching = false;
  for (const auto& b : bands) touching = touching || !b.simple();
  if (case_one) {
    if (!bands.empty()) return CaseTag::CaseIBand;
    return max_mult >= 2 ? CaseTag::CaseICircle : CaseTag::Empty;
  }
  if (max_mult >= 3) return CaseTag::ExceptionalCusp;
  if (touching) return CaseTag::Exceptional;
  if (max_mult == 2) return bands.empty() ? CaseTag::CircleOnly : CaseTag::CircleAndBand;
  switch (bands.size()) {
    case 0: return CaseTag::Empty;
    case 1: return CaseTag::SingleBand;
    default: return CaseTag::TwoBands;
  }
}

// Region from the critical levels alone; C is compared after snapping.
inline Region region_from_levels(const DropParams& p) {
  const double a = p.a;
  const double C = p.C;
  if (p.lambda0 == 0.0) return C >= case_one_level() ? Region::CaseISemiline : Region::None;
  if (a == 0.0) return Region::None;
  const double C1 = critical_level(a, 1).C;
  if (a < 0.0) {
    if (C == C1) return Region::Beta1;
    return C > C1 ? Region::Omega1 : Region::None;
  }
  if (C == C1) return Region::Beta1;
  if (C > C1) return Region::None;
  if (a > kCuspA && !is_cusp_a(a)) return Region::Omega3;
  const double C2 = critical_level(a, 2).C;
  const double C3 = critical_level(a, 3).C;
  if (is_cusp_a(a)) return C == C2 ? Region::SpecialPoint : Region::Omega3;
  if (C > C3) return Region::Omega3;
  if (C == C3) return Region::Beta3;
  if (C > C2) return Region::Omega2;
  if (C == C2) return Region::Beta2;
  return Region::Omega3;
}

}  // namespace detail

/// Region and case of (a, lambda0, C). The region comes from comparing C with
/// the critical levels; the case tag from the root structure of q.
inline ClassLabel classify(const DropParams& params, const RootTolerances& tol = {}) {
  require_canonical(params);
  ClassLabel out;
  DropParams p = params;
  const bool case_one = p.lambda0 == 0.0;
  if (case_one) {
    const double C0 = case_one_level();
    if (std::abs(p.C - C0) < kSnapTol) p.C = C0;
  } else if (p.a != 0.0) {
    for (const auto& lv : critical_levels(p.a)) {
      if (std::abs(p.C - lv.C) < kSnapTol) p.C = lv.C;
    }
  }
  out.params = p;
  const auto q = build_q(p);
  out.roots = positive_roots(q, tol);
  out.bands = bands_from_roots(q, out.roots);
  for (const auto& r : out.roots)
    if (r.multiplicity >= 2) out.circle_radii.push_back(std::sqrt(r.r));
  out.tag = detail::tag_from_roots(out.roots, out.bands, case_one);
  out.region = detail::region_from_levels(p);
  if (!case_one && p.a == 0.0) out.note = "a = 0 is the constant mean curvature case; no region is assigned";
  return out;
}

/// Whether a case tag is the one the region predicts.
inline bool region_matches_tag(Region region, CaseTag tag) {
  switch (region) {
    case Region::Omega1: return tag == CaseTag::SingleBand;
    case Region::Omega2: return tag == CaseTag::TwoBands;
    case Region::Omega3: return tag == CaseTag::SingleBand;
    case Region::Beta1: return tag == CaseTag::CircleOnly;
    case Region::Beta2: return tag == CaseTag::CircleAndBand;
    case Region::Beta3: return tag == CaseTag::Exceptional;
    case Region::SpecialPoint: return tag == CaseTag::ExceptionalCusp;
    case Region::CaseISemiline: return tag == CaseTag::CaseIBand || tag == CaseTag::CaseICircle;
    case Region::None: return tag == CaseTag::Empty || tag == CaseTag::SingleBand || tag == CaseTag::TwoBands;
  }
  return false;
}

}  // namespace drops
