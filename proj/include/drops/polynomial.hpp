#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace drops {

/// Dense real polynomial, coefficients in ascending order of degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  std::span<const double> coefficients() const { return c_; }
  double coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  /// Σ|c_k||x|^k, the natural scale for rounding error in evaluating p(x).
  double magnitude(double x) const {
    const double ax = std::abs(x);
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  /// Quotient of synthetic division by (x - root); the remainder is dropped.
  Polynomial deflate(double root) const {
    if (c_.size() <= 1) return {};
    std::vector<double> q(c_.size() - 1);
    double carry = 0.0;
    for (std::size_t k = c_.size() - 1; k >= 1; --k) {
      carry = c_[k] + carry * root;
      q[k - 1] = carry;
    }
    return Polynomial(std::move(q));
  }

  /// Cauchy bound: every real root lies in [-B, B].
  double root_bound() const {
    if (c_.size() <= 1) return 1.0;
    const double lead = std::abs(c_.back());
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < c_.size(); ++k) m = std::max(m, std::abs(c_[k]) / lead);
    return 1.0 + m;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

struct RealRoot {
  double value;
  int multiplicity;
};

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Bisection on a bracket where p is monotone and changes sign; runs until the
// midpoint no longer separates the endpoints.
inline double bisect_monotone(const Polynomial& p, double lo, double hi) {
  int s_lo = sign_of(p(lo));
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = p(mid);
    if (v == 0.0) return mid;
    if (sign_of(v) == s_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(p(lo)) <= std::abs(p(hi)) ? lo : hi;
}

}  // namespace detail

/// All real roots of p with multiplicities, in increasing order.
///
/// The roots of p' split the line into intervals on which p is monotone; each
/// sign change on such an interval holds exactly one simple root, found by
/// bisection. A critical point c where |p(c)| <= tol_mult * magnitude(c) is a
/// multiple root whose multiplicity is one more than its multiplicity in p'.
inline std::vector<RealRoot> real_roots(const Polynomial& p, double tol_mult = 1e-11) {
  std::vector<RealRoot> out;
  auto c = p.coefficients();
  std::size_t zeros = 0;
  while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
  if (zeros > 0 && zeros < c.size()) {
    out = real_roots(Polynomial(std::vector<double>(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end())), tol_mult);
    out.push_back({0.0, static_cast<int>(zeros)});
    std::sort(out.begin(), out.end(), [](const RealRoot& x, const RealRoot& y) { return x.value < y.value; });
    return out;
  }
  const int n = p.degree();
  if (n <= 0) return out;
  if (n == 1) {
    out.push_back({-p.coefficient(0) / p.coefficient(1), 1});
    return out;
  }

  const auto crit = real_roots(p.derivative(), tol_mult);
  const double bound = p.root_bound();

  std::vector<double> breaks;
  std::vector<bool> is_root;
  breaks.push_back(-bound);
  is_root.push_back(false);
  for (const auto& c : crit) {
    const bool hit = std::abs(p(c.value)) <= tol_mult * p.magnitude(c.value);
    breaks.push_back(c.value);
    is_root.push_back(hit);
    if (hit) out.push_back({c.value, c.multiplicity + 1});
  }
  breaks.push_back(bound);
  is_root.push_back(false);

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (is_root[i] || is_root[i + 1]) continue;
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (!(hi > lo)) continue;
    if (detail::sign_of(p(lo)) * detail::sign_of(p(hi)) < 0) {
      out.push_back({detail::bisect_monotone(p, lo, hi), 1});
    }
  }

  std::sort(out.begin(), out.end(), [](const RealRoot& x, const RealRoot& y) { return x.value < y.value; });
  return out;
}

/// Merge roots closer than tol_root * (1 + |r|); the merged entry sits at the
/// member with the highest multiplicity and carries the summed multiplicity.
inline std::vector<RealRoot> merge_clusters(std::vector<RealRoot> roots, double tol_root) {
  std::vector<RealRoot> merged;
  for (const auto& r : roots) {
    if (!merged.empty() && std::abs(r.value - merged.back().value) <= tol_root * (1.0 + std::abs(r.value))) {
      auto& m = merged.back();
      if (r.multiplicity > m.multiplicity) m.value = r.value;
      m.multiplicity += r.multiplicity;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

}  // namespace drops
