#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "drops/core.hpp"
#include "drops/quadrature.hpp"

namespace drops {

struct CurveSample {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double kappa = 0.0;

  double r() const { return x * x + y * y; }
};

using CurveSamples = std::vector<CurveSample>;

struct TraceOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  std::size_t samples = 1024;  // per fundamental piece, uniform in arc length
};

namespace detail {

using OdeState = std::array<double, 3>;

struct ProfileOde {
  double a;
  double lambda0;
  void operator()(const OdeState& u, OdeState& du, double) const {
    du[0] = std::cos(u[2]);
    du[1] = std::sin(u[2]);
    du[2] = -lambda0 + 0.5 * a * (u[0] * u[0] + u[1] * u[1]);
  }
};

inline CurveSample make_sample(double s, const OdeState& u, const DropParams& p) {
  CurveSample c;
  c.s = s;
  c.x = u[0];
  c.y = u[1];
  c.theta = u[2];
  const double ct = std::cos(u[2]);
  const double st = std::sin(u[2]);
  c.xi1 = c.x * ct + c.y * st;
  c.xi2 = c.x * st - c.y * ct;
  c.kappa = p.lambda0 - 0.5 * p.a * c.r();
  return c;
}

inline double xi1_of(const OdeState& u) { return u[0] * std::cos(u[2]) + u[1] * std::sin(u[2]); }

// Dense-output stepper over the profile ODE. Each call to advance() returns the
// interval covered by the last step; state_at() interpolates inside it.
class Tracer {
 public:
  Tracer(const DropParams& p, const OdeState& u0, const TraceOptions& opt)
      : ode_{p.a, p.lambda0},
        stepper_(boost::numeric::odeint::make_dense_output(
            opt.abs_tol, opt.rel_tol, boost::numeric::odeint::runge_kutta_dopri5<OdeState>())) {
    stepper_.initialize(u0, 0.0, 1e-3);
  }

  std::pair<double, double> advance() {
    const auto span = stepper_.do_step(ode_);
    if (!(span.second > span.first) || !std::isfinite(span.second))
      throw DropError(ErrorCode::ToleranceFailure, "step control failed");
    return span;
  }

  OdeState state_at(double t) {
    OdeState u{};
    stepper_.calc_state(t, u);
    return u;
  }

 private:
  ProfileOde ode_;
  boost::numeric::odeint::result_of::make_dense_output<boost::numeric::odeint::runge_kutta_dopri5<OdeState>>::type
      stepper_;
};

// Zero of xi1 between t0 and t1 where the sign differs.
inline double locate_xi1_zero(Tracer& tr, double t0, double t1) {
  double f0 = xi1_of(tr.state_at(t0));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (t0 + t1);
    if (mid <= t0 || mid >= t1) break;
    const double fm = xi1_of(tr.state_at(mid));
    if ((fm > 0) == (f0 > 0)) {
      t0 = mid;
      f0 = fm;
    } else {
      t1 = mid;
    }
  }
  return 0.5 * (t0 + t1);
}

inline OdeState initial_state(const TSPoint& start) { return {start.xi1, -start.xi2, 0.0}; }

}  // namespace detail

/// Traces the profile curve whose TreadmillSled starts at `start`, emitting
/// samples every `spacing` in arc length up to max_arclength (inclusive).
inline CurveSamples integrate_profile(const DropParams& p, const TSPoint& start, double max_arclength, double spacing,
                                      const TraceOptions& opt = {}) {
  if (!is_finite(p)) throw DropError(ErrorCode::InvalidParams, "parameters must be finite");
  const double g = eval_G(start.xi1, start.xi2, p);
  if (std::abs(g - p.C) > 1e-8 * (1.0 + std::abs(p.C)))
    throw DropError(ErrorCode::InvalidStart, "start point is not on the level set");
  if (!(spacing > 0.0) || !(max_arclength >= 0.0)) throw DropError(ErrorCode::InvalidParams, "bad sampling");
  CurveSamples out;
  const auto u0 = detail::initial_state(start);
  out.push_back(detail::make_sample(0.0, u0, p));
  if (max_arclength == 0.0) return out;
  const auto n = static_cast<std::size_t>(std::ceil(max_arclength / spacing - 1e-9));
  detail::Tracer tr(p, u0, opt);
  std::size_t next = 1;
  while (next <= n) {
    const auto [t0, t1] = tr.advance();
    while (next <= n) {
      const double t = std::min(static_cast<double>(next) * spacing, max_arclength);
      if (t > t1) break;
      out.push_back(detail::make_sample(t, tr.state_at(t), p));
      ++next;
    }
  }
  return out;
}

struct FundamentalPiece {
  CurveSamples samples;
  double delta_theta_measured = 0.0;
  double length = 0.0;
  double s_turn = 0.0;  // arc length where R^2 reaches r_max
  double r_min = 0.0;
  double r_max = 0.0;
  Band band;
};

namespace detail {

inline double wrap_near(double angle, double ref) {
  return angle + 2.0 * kPi * std::round((ref - angle) / (2.0 * kPi));
}

// Unwrapped change of the polar angle of (x, y) across the samples. A sample
// sitting at the origin is replaced by the direction the curve leaves or
// enters it along.
inline double polar_advance(const CurveSamples& s) {
  const std::size_t n = s.size();
  if (n < 2) return 0.0;
  const double eps = 1e-4 * (s[1].s - s[0].s);
  auto at_origin = [eps](const CurveSample& c) { return c.r() < eps * eps; };
  std::size_t i0 = 0;
  std::size_t i1 = n - 1;
  while (i0 < n && at_origin(s[i0])) ++i0;
  while (i1 > i0 && at_origin(s[i1])) --i1;
  if (i0 >= i1) return 0.0;
  double prev = std::atan2(s[i0].y, s[i0].x);
  double total = 0.0;
  for (std::size_t i = i0 + 1; i <= i1; ++i) {
    const double cur = std::atan2(s[i].y, s[i].x);
    total += wrap_near(cur - prev, 0.0);
    prev = cur;
  }
  if (i0 > 0) total += wrap_near(std::atan2(s[i0].y, s[i0].x) - s[0].theta, 0.0);
  if (i1 < n - 1) total += wrap_near(s[n - 1].theta + kPi - std::atan2(s[i1].y, s[i1].x), 0.0);
  return total;
}

}  // namespace detail

/// One fundamental piece of the profile curve over a band: from the
/// TreadmillSled point (0, xi2(r_lo)) until xi1 next crosses zero upward.
inline FundamentalPiece fundamental_piece(const DropParams& p, const Band& band, const TraceOptions& opt = {}) {
  if (!band.simple()) throw DropError(ErrorCode::Exceptional, "band endpoint is a multiple root");
  if (!(band.width() > 0.0)) throw DropError(ErrorCode::Degenerate, "band has zero width");
  const double estimate = arc_length(p, band);
  const TSPoint start{0.0, xi2_of_r(band.r_lo, p)};
  const auto u0 = detail::initial_state(start);

  // First pass: locate the turn (downward zero of xi1) and the closing upward zero.
  double s_turn = -1.0;
  double L = -1.0;
  {
    detail::Tracer tr(p, u0, opt);
    double prev_t = 0.0;
    double prev_f = 0.0;
    bool left_start = false;
    while (L < 0.0) {
      const auto [t0, t1] = tr.advance();
      if (t1 > 10.0 * estimate) throw DropError(ErrorCode::NonClosure, "piece did not close within 10x its length");
      const double f = detail::xi1_of(tr.state_at(t1));
      if (!left_start) {
        left_start = f > 0.0;
      } else if (s_turn < 0.0 && prev_f > 0.0 && f <= 0.0) {
        s_turn = detail::locate_xi1_zero(tr, prev_t, t1);
      } else if (s_turn >= 0.0 && prev_f < 0.0 && f >= 0.0) {
        L = detail::locate_xi1_zero(tr, prev_t, t1);
      }
      prev_t = t1;
      prev_f = f;
    }
  }

  // Second pass: uniform samples on [0, L].
  FundamentalPiece out;
  out.band = band;
  out.length = L;
  out.s_turn = s_turn;
  const std::size_t m = std::max<std::size_t>(opt.samples, 8);
  out.samples.reserve(m + 1);
  out.samples.push_back(detail::make_sample(0.0, u0, p));
  detail::Tracer tr(p, u0, opt);
  std::size_t next = 1;
  while (next <= m) {
    const auto [t0, t1] = tr.advance();
    while (next <= m) {
      const double t = (next == m) ? L : L * static_cast<double>(next) / static_cast<double>(m);
      if (t > t1) break;
      out.samples.push_back(detail::make_sample(t, tr.state_at(t), p));
      ++next;
    }
  }
  out.r_min = out.r_max = out.samples.front().r();
  for (const auto& c : out.samples) {
    out.r_min = std::min(out.r_min, c.r());
    out.r_max = std::max(out.r_max, c.r());
  }
  out.delta_theta_measured = detail::polar_advance(out.samples);
  return out;
}

inline std::vector<TSPoint> treadmill_sled(const CurveSamples& samples) {
  std::vector<TSPoint> out;
  out.reserve(samples.size());
  for (const auto& c : samples) {
    const double ct = std::cos(c.theta);
    const double st = std::sin(c.theta);
    out.push_back({c.x * ct + c.y * st, c.x * st - c.y * ct});
  }
  return out;
}

enum class SymmetryKind { Rational, Irrational, Exceptional };

struct SymmetryType {
  SymmetryKind kind = SymmetryKind::Irrational;
  long m = 0;  // Δθ̃ / 2π ≈ m / k
  long k = 0;
  long order = 0;  // pieces needed to close the curve

  double angle() const { return 2.0 * kPi * static_cast<double>(m) / static_cast<double>(k); }
};

/// Continued-fraction test of Δθ̃ / 2π against rationals m/k with k <= max_denominator.
inline SymmetryType symmetry_type(double delta_theta, double tol = 1e-9, long max_denominator = 64) {
  SymmetryType out;
  if (!std::isfinite(delta_theta)) {
    out.kind = SymmetryKind::Exceptional;
    return out;
  }
  const double x = delta_theta / (2.0 * kPi);
  long h_prev = 1, h_prev2 = 0;
  long k_prev = 0, k_prev2 = 1;
  double rem = x;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(rem);
    if (std::abs(fl) > 1e15) break;
    const long ai = static_cast<long>(fl);
    const long h = ai * h_prev + h_prev2;
    const long k = ai * k_prev + k_prev2;
    if (k > max_denominator) break;
    if (std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= tol) {
      out.kind = SymmetryKind::Rational;
      out.m = h;
      out.k = k;
      out.order = k;
      return out;
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double frac = rem - fl;
    if (frac <= 0.0) break;
    rem = 1.0 / frac;
  }
  return out;
}

/// Group order read off Δθ̃/π = m'/k' in lowest terms: k' when m' is even, 2k' when odd.
inline long group_order_from_pi_ratio(long m_pi, long k_pi) {
  const long g = std::gcd(m_pi, k_pi);
  m_pi /= g;
  k_pi /= g;
  return (m_pi % 2 == 0) ? std::abs(k_pi) : 2 * std::abs(k_pi);
}

struct ProfileCurve {
  CurveSamples samples;  // closed curves repeat the first point at the end
  std::size_t pieces = 0;
  double piece_length = 0.0;
  bool closed = false;

  double length() const { return samples.empty() ? 0.0 : samples.back().s - samples.front().s; }
};

namespace detail {

inline CurveSample rotate_sample(const CurveSample& c, double angle, double dtheta, double ds) {
  CurveSample r = c;
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  r.x = ca * c.x - sa * c.y;
  r.y = sa * c.x + ca * c.y;
  r.theta = c.theta + dtheta;
  r.s = c.s + ds;
  return r;
}

}  // namespace detail

/// `copies` rotated copies of the piece, each turned by `angle` from the last.
inline ProfileCurve assemble_copies(const FundamentalPiece& piece, std::size_t copies, double angle) {
  ProfileCurve out;
  out.pieces = copies;
  out.piece_length = piece.length;
  const auto& s = piece.samples;
  const double turning = s.back().theta - s.front().theta;
  for (std::size_t n = 0; n < copies; ++n) {
    const double nn = static_cast<double>(n);
    for (std::size_t i = (n == 0 ? 0 : 1); i < s.size(); ++i)
      out.samples.push_back(detail::rotate_sample(s[i], nn * angle, nn * turning, nn * piece.length));
  }
  return out;
}

struct AssembleOptions {
  double snap_tol = 1e-6;  // relative to the curve's outer radius
};

/// Closed profile curve: the piece rotated by 2πm/k, order times.
inline ProfileCurve assemble_curve(const FundamentalPiece& piece, const SymmetryType& sym,
                                   const AssembleOptions& opt = {}) {
  if (sym.kind != SymmetryKind::Rational)
    throw DropError(ErrorCode::NotClosed, "Δθ̃ is not a rational multiple of 2π at this tolerance");
  const double angle = sym.angle();
  const double scale = 1.0 + std::sqrt(piece.r_max);
  const auto& a = piece.samples.front();
  const auto& b = piece.samples.back();
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  const double gap = std::hypot(ca * a.x - sa * a.y - b.x, sa * a.x + ca * a.y - b.y);
  if (gap > opt.snap_tol * scale)
    throw DropError(ErrorCode::NotClosed, "junction gap " + std::to_string(gap) + " exceeds tolerance");
  auto out = assemble_copies(piece, static_cast<std::size_t>(sym.order), angle);
  out.samples.back().x = out.samples.front().x;
  out.samples.back().y = out.samples.front().y;
  out.closed = true;
  return out;
}

/// Round solution of signed radius R traced as a closed curve with n samples.
inline ProfileCurve circle_curve(const DropParams& p, double R_signed, std::size_t n = 512,
                                 const TraceOptions& opt = {}) {
  const double L = 2.0 * kPi * std::abs(R_signed);
  DropParams on_level = p;
  on_level.C = circle_level(R_signed, p);
  ProfileCurve out;
  out.samples = integrate_profile(on_level, {0.0, -R_signed}, L, L / static_cast<double>(n), opt);
  out.samples.back().x = out.samples.front().x;
  out.samples.back().y = out.samples.front().y;
  out.pieces = 1;
  out.piece_length = L;
  out.closed = true;
  return out;
}

struct ExceptionalTrace {
  CurveSamples samples;  // cut at the closest approach to the limit circle's TreadmillSled point
  double limit_R = std::numeric_limits<double>::quiet_NaN();
  double target_R = std::numeric_limits<double>::quiet_NaN();  // sqrt of the double root
  bool truncated = false;
};

/// Trace on a band with a double-root endpoint: the curve spirals onto the
/// circle of that radius. Rounding eventually pushes the trace off the
/// separatrix, so samples past the closest approach to the saddle are dropped. The limit
/// radius is extrapolated by Aitken's Δ² on R(s).
inline ExceptionalTrace trace_exceptional(const DropParams& p, const Band& band, double max_arclength,
                                          double spacing = 0.01, const TraceOptions& opt = {}) {
  if (band.simple()) throw DropError(ErrorCode::InvalidParams, "band has no multiple endpoint");
  const bool double_at_hi = band.mult_hi >= 2;
  const double r_start = double_at_hi ? band.r_lo : band.r_hi;
  ExceptionalTrace out;
  out.target_R = std::sqrt(double_at_hi ? band.r_hi : band.r_lo);
  out.samples = integrate_profile(p, {0.0, xi2_of_r(r_start, p)}, max_arclength, spacing, opt);
  auto& s = out.samples;
  const double saddle_xi2 = xi2_of_r(out.target_R * out.target_R, p);
  auto dist = [&](const CurveSample& c) { return std::hypot(c.xi1, c.xi2 - saddle_xi2); };
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (dist(s[i]) > dist(s[i - 1])) {
      s.resize(i);
      out.truncated = true;
      break;
    }
  }
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(2.0 / spacing));
  for (std::size_t i = s.size(); i >= 2 * stride + 1; --i) {
    const double r0 = std::sqrt(s[i - 1 - 2 * stride].r());
    const double r1 = std::sqrt(s[i - 1 - stride].r());
    const double r2 = std::sqrt(s[i - 1].r());
    const double d1 = r1 - r0;
    const double d2 = r2 - r1;
    if (std::abs(d2) < 1e-8 * (1.0 + r2) || std::abs(d2 - d1) < 1e-14) continue;
    out.limit_R = r2 - d2 * d2 / (d2 - d1);
    break;
  }
  if (!std::isfinite(out.limit_R)) out.limit_R = std::sqrt(s.back().r());
  return out;
}

struct EmbedOptions {
  double grid = 1e-9;  // grid cell as a fraction of the curve's extent
  int max_refinements = 2;
};

namespace detail {

using i128 = __int128;

struct IPoint {
  std::int64_t x;
  std::int64_t y;
  bool operator==(const IPoint&) const = default;
};

inline int orient(const IPoint& a, const IPoint& b, const IPoint& c) {
  const i128 v = static_cast<i128>(b.x - a.x) * (c.y - a.y) - static_cast<i128>(b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

inline bool on_segment(const IPoint& a, const IPoint& b, const IPoint& c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

enum class Contact { None, Cross, Touch };

inline Contact segment_contact(const IPoint& a, const IPoint& b, const IPoint& c, const IPoint& d) {
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return Contact::Cross;
  if ((o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) || (o3 == 0 && on_segment(c, d, a)) ||
      (o4 == 0 && on_segment(c, d, b)))
    return Contact::Touch;
  return Contact::None;
}

inline std::vector<IPoint> quantize(const CurveSamples& s, double cell) {
  std::vector<IPoint> pts;
  pts.reserve(s.size());
  for (const auto& c : s) {
    IPoint p{static_cast<std::int64_t>(std::llround(c.x / cell)), static_cast<std::int64_t>(std::llround(c.y / cell))};
    if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
  }
  return pts;
}

// Sweep over segments sorted by their left x. Returns Cross as soon as a
// transverse crossing is found, Touch if only contacts were seen.
inline Contact sweep_contacts(const std::vector<IPoint>& pts, bool closed) {
  const std::size_t n = pts.size();
  if (n < 4) return Contact::None;
  std::size_t nseg = n - 1;
  std::vector<std::size_t> order(nseg);
  std::iota(order.begin(), order.end(), 0);
  auto xmin = [&](std::size_t i) { return std::min(pts[i].x, pts[i + 1].x); };
  auto xmax = [&](std::size_t i) { return std::max(pts[i].x, pts[i + 1].x); };
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xmin(i) < xmin(j); });
  auto adjacent = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    if (j == i + 1) return true;
    return closed && i == 0 && j == nseg - 1;
  };
  Contact worst = Contact::None;
  for (std::size_t oi = 0; oi < nseg; ++oi) {
    const std::size_t i = order[oi];
    const auto hi = xmax(i);
    for (std::size_t oj = oi + 1; oj < nseg && xmin(order[oj]) <= hi; ++oj) {
      const std::size_t j = order[oj];
      if (adjacent(i, j)) continue;
      const auto c = segment_contact(pts[i], pts[i + 1], pts[j], pts[j + 1]);
      if (c == Contact::Cross) return Contact::Cross;
      if (c == Contact::Touch) worst = Contact::Touch;
    }
  }
  return worst;
}

}  // namespace detail

/// True when no two non-adjacent polyline segments cross. Contacts that are
/// not transverse are re-tested on a finer grid and reported as
/// InsufficientResolution if they persist.
inline bool is_embedded(const ProfileCurve& curve, const EmbedOptions& opt = {}) {
  double extent = 0.0;
  for (const auto& c : curve.samples) extent = std::max({extent, std::abs(c.x), std::abs(c.y)});
  if (extent == 0.0) return true;
  double cell = opt.grid * extent;
  for (int level = 0; level <= opt.max_refinements; ++level, cell /= 16.0) {
    auto pts = detail::quantize(curve.samples, cell);
    const bool closed = curve.closed && pts.size() > 1 && pts.front() == pts.back();
    const auto c = detail::sweep_contacts(pts, closed);
    if (c == detail::Contact::Cross) return false;
    if (c == detail::Contact::None) return true;
  }
  throw DropError(ErrorCode::InsufficientResolution, "segments touch at the finest grid");
}

}  // namespace drops
