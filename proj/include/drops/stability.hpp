#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drops/core.hpp"
#include "drops/profile.hpp"

namespace drops {

/// −u'' − V u = μ u on a circle of circumference L, V sampled on a uniform grid.
struct HillProblem {
  double L = 0.0;
  std::vector<double> V;  // periodic, no repeated endpoint

  std::size_t N() const { return V.size(); }
};

namespace detail {

// Uniform samples of a closed curve without the repeated endpoint.
inline CurveSamples periodic_samples(const ProfileCurve& curve) {
  CurveSamples s = curve.samples;
  if (curve.closed && s.size() > 1) s.pop_back();
  return s;
}

}  // namespace detail

inline HillProblem hill_problem(const ProfileCurve& curve, const DropParams& p) {
  if (!curve.closed) throw DropError(ErrorCode::NotClosed, "Hill problem needs a closed curve");
  HillProblem h;
  h.L = curve.length();
  for (const auto& c : detail::periodic_samples(curve)) h.V.push_back(c.kappa * c.kappa + p.a * c.xi2);
  return h;
}

struct HillSpectrum {
  std::vector<double> mu;         // Richardson-extrapolated, ascending
  std::vector<double> mu_fine;    // grid N
  std::vector<double> mu_coarse;  // grid N/2
  Eigen::MatrixXd modes;          // fine-grid eigenvectors, one column per mode
  double convergence = 0.0;       // max |mu - mu_fine|
};

struct HillOptions {
  double conv_tol = 1e-2;  // allowed |mu - mu_fine| / (1 + |mu|)
};

namespace detail {

inline Eigen::MatrixXd hill_matrix(const std::vector<double>& V, double L, std::size_t stride) {
  const auto n = static_cast<Eigen::Index>(V.size() / stride);
  const double h = L / static_cast<double>(n);
  const double w = 1.0 / (h * h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = 2.0 * w - V[static_cast<std::size_t>(i) * stride];
    A(i, (i + 1) % n) -= w;
    A(i, (i + n - 1) % n) -= w;
  }
  return A;
}

}  // namespace detail

/// Lowest n_modes eigenvalues by the periodic 3-point stencil on N and N/2
/// points, combined as (4 μ_N − μ_{N/2}) / 3.
inline HillSpectrum hill_eigenvalues(const HillProblem& prob, std::size_t n_modes, const HillOptions& opt = {}) {
  const std::size_t N = prob.N();
  if (N < 64 || N % 2 != 0) throw DropError(ErrorCode::InvalidParams, "Hill grid needs an even N >= 64");
  if (n_modes == 0 || n_modes > N / 2) throw DropError(ErrorCode::InvalidParams, "bad mode count");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fine(detail::hill_matrix(prob.V, prob.L, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> coarse(detail::hill_matrix(prob.V, prob.L, 2),
                                                        Eigen::EigenvaluesOnly);
  HillSpectrum out;
  out.modes = fine.eigenvectors().leftCols(static_cast<Eigen::Index>(n_modes));
  for (std::size_t j = 0; j < n_modes; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double mf = fine.eigenvalues()(jj);
    const double mc = coarse.eigenvalues()(jj);
    const double mu = (4.0 * mf - mc) / 3.0;
    out.mu_fine.push_back(mf);
    out.mu_coarse.push_back(mc);
    out.mu.push_back(mu);
    const double d = std::abs(mu - mf);
    out.convergence = std::max(out.convergence, d);
    if (d > opt.conv_tol * (1.0 + std::abs(mu)))
      throw DropError(ErrorCode::NotConverged, "Richardson correction too large for mode " + std::to_string(j));
  }
  return out;
}

/// Cyclic sign changes of a periodic sequence, ignoring entries below eps.
inline std::size_t sign_changes(const std::vector<double>& v, double eps = 0.0) {
  std::vector<int> signs;
  for (double x : v)
    if (std::abs(x) > eps) signs.push_back(x > 0 ? 1 : -1);
  std::size_t n = 0;
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (signs[i] != signs[(i + 1) % signs.size()]) ++n;
  return n;
}

enum class Problem { Free, Fixed };

inline std::string_view to_string(Problem p) { return p == Problem::Free ? "free" : "fixed"; }

struct Verdict {
  std::string rule;  // PROP_A, CP_MULTI_CRIT, CP_LARGE_H, ROUND_FREE, FIXED_C1, FIXED_C2, HEIGHT_BOUND, BIFURCATION_FLAG
  std::string outcome;
  double h_lo = 0.0;  // outcome holds for h in [h_lo, h_hi]
  double h_hi = std::numeric_limits<double>::infinity();
  std::string detail;
};

struct HeightBound {
  std::string rule;
  double h_max;
};

struct StabilityReport {
  Problem problem = Problem::Free;
  double h = 0.0;
  std::vector<double> mu;
  std::size_t J = 0;
  std::size_t morse_index_lower_bound = 0;
  std::vector<Verdict> verdicts;
  std::vector<HeightBound> h_max_bounds;
  std::vector<std::string> notes;
  std::string overall = "Inconclusive";
};

inline void set_spectrum(StabilityReport& rep, const std::vector<double>& mu, double zero_tol = 1e-6) {
  rep.mu = mu;
  rep.J = static_cast<std::size_t>(std::count_if(mu.begin(), mu.end(), [&](double m) { return m < -zero_tol; }));
  rep.morse_index_lower_bound = rep.J > 0 ? rep.J - 1 : 0;
}

inline bool is_round(const ProfileCurve& curve, double tol = 1e-7) {
  double m = 0.0;
  double scale = 0.0;
  for (const auto& c : curve.samples) {
    m = std::max(m, std::abs(c.xi1));
    scale = std::max(scale, std::sqrt(c.r()));
  }
  return m <= tol * (1.0 + scale);
}

/// Theorem CP verdicts for the free problem. mu1 is the lowest Hill eigenvalue.
inline std::vector<Verdict> cp_instability_test(const ProfileCurve& curve, const DropParams& p, double mu1,
                                                std::optional<bool> embedded = std::nullopt) {
  (void)p;
  std::vector<Verdict> out;
  if (is_round(curve)) {
    out.push_back({"CP_MULTI_CRIT", "NotApplicable", 0.0, std::numeric_limits<double>::infinity(), "round curve"});
    return out;
  }
  std::vector<double> xi1;
  for (const auto& c : detail::periodic_samples(curve)) xi1.push_back(c.xi1);
  double scale = 0.0;
  for (double v : xi1) scale = std::max(scale, std::abs(v));
  const std::size_t changes = sign_changes(xi1, 1e-12 * scale);
  const bool emb = embedded.has_value() ? *embedded : is_embedded(curve);
  if (changes >= 4 || emb) {
    out.push_back({"CP_MULTI_CRIT", "Unstable-all-h", 0.0, std::numeric_limits<double>::infinity(),
                   std::to_string(changes) + " sign changes of xi1" + (emb ? ", embedded" : "")});
  }
  if (mu1 < 0.0) {
    const double h_star = kPi / std::sqrt(-mu1);
    out.push_back({"CP_LARGE_H", "Unstable-for-large-h", h_star, std::numeric_limits<double>::infinity(),
                   "unstable for h > pi/sqrt(-mu1)"});
  }
  return out;
}

/// Radius where a R + 1/R^2 equals target, for a < 0.
inline double round_critical_radius(double a, double target) {
  auto f = [&](double R) { return a * R + 1.0 / (R * R) - target; };
  double lo = 1e-6;
  double hi = 1.0;
  while (f(hi) > 0.0) hi *= 2.0;
  while (f(lo) < 0.0) lo /= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Verdicts for the round cylinder of radius R and height h.
inline StabilityReport round_cylinder_report(double a, double lambda0, double R, double h, Problem problem) {
  StabilityReport rep;
  rep.problem = problem;
  rep.h = h;
  const double inf = std::numeric_limits<double>::infinity();
  if (!(R > 0.0) || !(h > 0.0)) throw DropError(ErrorCode::InvalidParams, "R and h must be positive");
  bool equilibrium = false;
  for (const auto& c : circle_radii({a, lambda0, 0.0}))
    equilibrium = equilibrium || std::abs(c.R - R) <= 1e-6 * (1.0 + R);
  if (!equilibrium) rep.notes.push_back("NonEquilibriumRadius: R is not a root of a R^3 - 2 lambda0 R + 2");

  const double s = a * R + 1.0 / (R * R);
  const double k = kPi * kPi / (h * h);
  if (problem == Problem::Free) {
    if (a > 0.0) {
      rep.verdicts.push_back({"PROP_A", "Unstable", 0.0, inf, "a > 0"});
      rep.overall = "Unstable";
    } else if (s <= 0.0) {
      rep.verdicts.push_back({"ROUND_FREE", "Stable", 0.0, inf, "a R + 1/R^2 <= 0"});
      rep.h_max_bounds.push_back({"ROUND_FREE", inf});
      rep.overall = "Stable";
    } else {
      const double h_max = kPi / std::sqrt(s);
      rep.h_max_bounds.push_back({"ROUND_FREE", h_max});
      const bool stable = k >= s;
      rep.verdicts.push_back({"ROUND_FREE", stable ? "Stable" : "Unstable", stable ? 0.0 : h_max,
                              stable ? h_max : inf, "stable iff pi^2/h^2 >= a R + 1/R^2"});
      rep.overall = stable ? "Stable" : "Unstable";
    }
  } else {
    bool fail = false;
    if (s > 0.0) {
      const double hb = 2.0 * kPi / std::sqrt(s);
      rep.h_max_bounds.push_back({"FIXED_C1", hb});
      const bool ok = 4.0 * k >= s;
      fail = fail || !ok;
      rep.verdicts.push_back({"FIXED_C1", ok ? "Holds" : "Unstable", ok ? 0.0 : hb, ok ? hb : inf,
                              "4 pi^2/h^2 >= a R + 1/R^2"});
    } else {
      rep.verdicts.push_back({"FIXED_C1", "Holds", 0.0, inf, "a R + 1/R^2 <= 0"});
    }
    if (a * R > 0.0) {
      const double hb = kPi / std::sqrt(a * R);
      rep.h_max_bounds.push_back({"FIXED_C2", hb});
      const bool ok = k >= a * R;
      fail = fail || !ok;
      rep.verdicts.push_back({"FIXED_C2", ok ? "Holds" : "Unstable", ok ? 0.0 : hb, ok ? hb : inf, "pi^2/h^2 >= a R"});
    } else {
      rep.verdicts.push_back({"FIXED_C2", "Holds", 0.0, inf, "a R <= 0"});
    }
    rep.overall = fail ? "Unstable" : "Inconclusive";
  }
  if (a > 0.0) {
    const bool flag = R * R * R >= 1.0 / (3.0 * a);
    rep.verdicts.push_back({"BIFURCATION_FLAG", flag ? "Flag" : "NoFlag", 0.0, inf, "R^3 >= 1/(3a)"});
  } else if (a < 0.0) {
    const double R0 = round_critical_radius(a, k);
    rep.verdicts.push_back({"BIFURCATION_FLAG", "CriticalRadius", 0.0, inf,
                            "R0 = " + std::to_string(R0) + " solves pi^2/h^2 = a R0 + 1/R0^2"});
  }
  return rep;
}

struct HeightBounds {
  double left = 0.0;
  double middle = 0.0;
  double h_max = 0.0;
  double xi1_max = 0.0;
  double xi1_min = 0.0;
};

namespace detail {

// Periodic trapezoid rule on uniform samples.
template <class F>
double periodic_integral(const CurveSamples& s, double L, F f) {
  double acc = 0.0;
  for (const auto& c : s) acc += f(c);
  return acc * L / static_cast<double>(s.size());
}

}  // namespace detail

inline HeightBounds height_bounds(const ProfileCurve& curve, const DropParams& p, Problem problem) {
  (void)p;
  const auto s = detail::periodic_samples(curve);
  const double L = curve.length();
  HeightBounds out;
  out.xi1_max = -std::numeric_limits<double>::infinity();
  out.xi1_min = std::numeric_limits<double>::infinity();
  double g_max = 0.0;
  for (const auto& c : s) {
    out.xi1_max = std::max(out.xi1_max, c.xi1);
    out.xi1_min = std::min(out.xi1_min, c.xi1);
    g_max = std::max(g_max, std::abs(2.0 * (1.0 + c.kappa * c.xi2)));
  }
  const double denom = detail::periodic_integral(s, L, [](const CurveSample& c) {
    const double v = 1.0 + c.kappa * c.xi2;
    return v * v;
  });
  if (denom <= 1e-12 * L) throw DropError(ErrorCode::CircularInput, "round curve: the integral of (1 + kappa xi2)^2 vanishes");
  out.left = 4.0 * std::exp(4.0 * out.xi1_max) / (g_max * g_max);
  out.middle = std::exp(2.0 * (out.xi1_max - out.xi1_min)) * L / denom;
  out.h_max = (problem == Problem::Fixed ? 2.0 * kPi : kPi) / std::sqrt(out.middle);
  return out;
}

/// Signed area ∮ x dy, computed as ½∮ xi2 ds.
inline double signed_area(const ProfileCurve& curve) {
  const auto s = detail::periodic_samples(curve);
  return 0.5 * detail::periodic_integral(s, curve.length(), [](const CurveSample& c) { return c.xi2; });
}

/// Shoelace area of the polyline.
inline double shoelace_area(const ProfileCurve& curve) {
  const auto& s = curve.samples;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) acc += s[i].x * s[i + 1].y - s[i + 1].x * s[i].y;
  return 0.5 * acc;
}

/// Necessary conditions for the fixed problem, normalized by the length:
/// 4π²/h² ≥ (∮κ² + 2a𝔄)/L, and for embedded curves 4π²/h² ≥ 4π²/L² + 2a𝔄/L.
inline std::vector<Verdict> fixed_necessary_conditions(const ProfileCurve& curve, const DropParams& p, double h,
                                                       std::optional<bool> embedded = std::nullopt) {
  const auto s = detail::periodic_samples(curve);
  const double L = curve.length();
  const double A = signed_area(curve);
  const double k2 = detail::periodic_integral(s, L, [](const CurveSample& c) { return c.kappa * c.kappa; });
  const double lhs = 4.0 * kPi * kPi / (h * h);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Verdict> out;
  auto add = [&](double rhs, const std::string& what) {
    const double hb = rhs > 0.0 ? 2.0 * kPi / std::sqrt(rhs) : inf;
    const bool ok = lhs >= rhs;
    out.push_back({"FIXED_C1", ok ? "Holds" : "Unstable", ok ? 0.0 : hb, ok ? hb : inf,
                   what + "; rhs = " + std::to_string(rhs)});
  };
  add((k2 + 2.0 * p.a * A) / L, "4 pi^2/h^2 >= (int kappa^2 + 2 a A)/L");
  const bool emb = embedded.has_value() ? *embedded : is_embedded(curve);
  if (emb) add(4.0 * kPi * kPi / (L * L) + 2.0 * p.a * A / L, "embedded: 4 pi^2/h^2 >= 4 pi^2/L^2 + 2 a A/L");
  return out;
}

struct ZMode {
  enum Kind { Const, Sin, Cos } kind = Const;
  int k = 1;
};

struct SecondVariation {
  double value = 0.0;
  double mean = 0.0;  // ∫ψ dΣ
  bool mean_value_violation = false;
};

namespace detail {

// 8th-order periodic central difference.
inline std::vector<double> periodic_derivative(const std::vector<double>& u, double ds) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const std::size_t n = u.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= 4; ++j) acc += c[j - 1] * (u[(i + j) % n] - u[(i + n - j) % n]);
    d[i] = acc / ds;
  }
  return d;
}

}  // namespace detail

/// δ²𝓔 for ψ = u(s) f(z) with z in [−h/2, h/2]; the z integrals are exact.
inline SecondVariation second_variation(const ProfileCurve& curve, const DropParams& p, const std::vector<double>& u,
                                        ZMode mode, double h, double mean_tol = 1e-8) {
  const auto s = detail::periodic_samples(curve);
  if (u.size() != s.size()) throw DropError(ErrorCode::InvalidParams, "u must have one value per curve sample");
  const double L = curve.length();
  const double ds = L / static_cast<double>(s.size());
  const auto us = detail::periodic_derivative(u, ds);
  double grad = 0.0;
  double pot = 0.0;
  double mass = 0.0;
  double sum_u = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double V = s[i].kappa * s[i].kappa + p.a * s[i].xi2;
    grad += us[i] * us[i];
    pot += V * u[i] * u[i];
    mass += u[i] * u[i];
    sum_u += u[i];
  }
  grad *= ds;
  pot *= ds;
  mass *= ds;
  sum_u *= ds;
  double f2 = h;
  double fz2 = 0.0;
  double f1 = h;
  if (mode.kind != ZMode::Const) {
    const double w = mode.k * kPi / h;
    f2 = h / 2.0;
    fz2 = w * w * h / 2.0;
    f1 = mode.kind == ZMode::Sin ? 0.0 : 2.0 / w * std::sin(w * h / 2.0);
  }
  SecondVariation out;
  out.value = f2 * (grad - pot) + fz2 * mass;
  out.mean = sum_u * f1;
  out.mean_value_violation = std::abs(out.mean) > mean_tol * std::sqrt(mass * L) * h;
  return out;
}

struct Energy {
  double length = 0.0;
  double area = 0.0;
  double r2_moment = 0.0;  // ∫∫ R² d𝔄
  double value = 0.0;
};

/// 𝓖 = 𝓛 − (a/2) ∫∫ R² d𝔄 + Λ0 𝔄, with ∫∫ R² d𝔄 = ¼ ∮ R² xi2 ds.
inline Energy curve_energy(const ProfileCurve& curve, const DropParams& p) {
  const auto s = detail::periodic_samples(curve);
  Energy e;
  e.length = curve.length();
  e.area = signed_area(curve);
  e.r2_moment = 0.25 * detail::periodic_integral(s, e.length, [](const CurveSample& c) { return c.r() * c.xi2; });
  e.value = e.length - 0.5 * p.a * e.r2_moment + p.lambda0 * e.area;
  return e;
}

/// Energy of a circle of radius R traversed counter-clockwise (sigma = 1) or clockwise (sigma = -1).
inline double circle_energy(double R, int sigma, const DropParams& p) {
  return 2.0 * kPi * R + sigma * (p.lambda0 * kPi * R * R - p.a * kPi * R * R * R * R / 4.0);
}

struct StabilityInputs {
  std::size_t n_modes = 6;
  std::optional<bool> embedded;
};

/// Rule-based report for a closed non-round equilibrium curve at height h.
inline StabilityReport stability_report(const ProfileCurve& curve, const DropParams& p, double h, Problem problem,
                                        const StabilityInputs& in = {}) {
  StabilityReport rep;
  rep.problem = problem;
  rep.h = h;
  const double inf = std::numeric_limits<double>::infinity();
  const auto spec = hill_eigenvalues(hill_problem(curve, p), in.n_modes);
  set_spectrum(rep, spec.mu);
  const bool emb = in.embedded.has_value() ? *in.embedded : is_embedded(curve);
  bool unstable = false;
  if (problem == Problem::Free) {
    if (p.a > 0.0 && emb) {
      rep.verdicts.push_back({"PROP_A", "Unstable", 0.0, inf, "a > 0, embedded"});
      unstable = true;
    }
    for (auto& v : cp_instability_test(curve, p, spec.mu.front(), emb)) {
      if (v.outcome == "Unstable-all-h" || (v.outcome == "Unstable-for-large-h" && h > v.h_lo)) unstable = true;
      rep.verdicts.push_back(std::move(v));
    }
  } else {
    for (auto& v : fixed_necessary_conditions(curve, p, h, emb)) {
      if (v.outcome == "Unstable") unstable = true;
      if (std::isfinite(v.outcome == "Holds" ? v.h_hi : v.h_lo))
        rep.h_max_bounds.push_back({v.rule, v.outcome == "Holds" ? v.h_hi : v.h_lo});
      rep.verdicts.push_back(std::move(v));
    }
  }
  const auto hb = height_bounds(curve, p, problem);
  rep.h_max_bounds.push_back({"HEIGHT_BOUND", hb.h_max});
  const bool over = h > hb.h_max;
  rep.verdicts.push_back({"HEIGHT_BOUND", over ? "Unstable" : "Holds", over ? hb.h_max : 0.0, over ? inf : hb.h_max,
                          "left = " + std::to_string(hb.left) + ", middle = " + std::to_string(hb.middle)});
  unstable = unstable || over;
  rep.overall = unstable ? "Unstable" : "Inconclusive";
  if (!unstable) rep.notes.push_back("no rule decides stability of a non-round curve at this height");
  return rep;
}

}  // namespace drops
