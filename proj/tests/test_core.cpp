#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace drops;

namespace {

double c0() { return -3.0 * std::pow(2.0, -2.0 / 3.0); }

}  // namespace

TEST(LevelFunction, VanishesAtOrigin) {
  for (double a : {-2.0, -1.0, 0.1, 0.3})
    for (double C : {-1.0, 0.0, 2.0}) EXPECT_EQ(eval_G(0.0, 0.0, {a, 1.0, C}), 0.0);
}

TEST(LevelFunction, CuspCirclePoint) {
  EXPECT_NEAR(eval_G(0.0, -1.5, {kCuspA, 1.0, 0.0}), -9.0 / 8.0, 1e-14);
}

TEST(LevelFunction, EvenInXi1) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const DropParams p{u(rng), 1.0, u(rng)};
    const double x = u(rng), y = u(rng);
    EXPECT_EQ(eval_G(x, y, p), eval_G(-x, y, p));
  }
}

TEST(Quartic, CaseOneAtZeroLevel) {
  const auto q = build_q({-1.0, 0.0, 0.0});
  const double expect[5] = {0.0, 64.0, 0.0, 0.0, -1.0};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(q.c[i], expect[i]);
}

TEST(Quartic, ZeroRotationIsQuadratic) {
  const auto q = build_q({0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(q.c[0], 0.0);
  EXPECT_DOUBLE_EQ(q.c[1], 64.0);
  EXPECT_DOUBLE_EQ(q.c[2], -16.0);
  EXPECT_DOUBLE_EQ(q.c[3], 0.0);
  EXPECT_DOUBLE_EQ(q.c[4], 0.0);
}

TEST(Quartic, CaseOneReduction) {
  for (double C : {-1.5, 0.3, 4.0}) {
    const auto q = build_q({-1.0, 0.0, C});
    EXPECT_DOUBLE_EQ(q.c[0], -16 * C * C);
    EXPECT_DOUBLE_EQ(q.c[1], 64.0);
    EXPECT_DOUBLE_EQ(q.c[2], 8 * C);
    EXPECT_DOUBLE_EQ(q.c[3], 0.0);
    EXPECT_DOUBLE_EQ(q.c[4], -1.0);
  }
}

TEST(Quartic, MatchesRadialDecomposition) {
  // q = 64 (r - xi2^2) = (8 xi1)^2.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ua(-2.0, 0.29), uc(-1.0, 6.0);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const DropParams p{ua(rng), 1.0, uc(rng)};
    if (p.a == 0.0) continue;
    const auto label = classify(p);
    const auto q = build_q(label.params);
    for (const auto& b : label.bands) {
      for (int j = 1; j < 10; ++j) {
        const double r = b.r_lo + b.width() * j / 10.0;
        const double x2 = xi2_of_r(r, label.params);
        EXPECT_NEAR(q(r), 64.0 * (r - x2 * x2), 1e-9 * q.magnitude(r));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Quartic, ConstantTermNonPositive) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const auto q = build_q({u(rng), 1.0, u(rng)});
    EXPECT_LE(q(0.0), 0.0);
  }
}

TEST(Roots, CuspTripleRoot) {
  const auto roots = positive_roots(build_q({kCuspA, 1.0, -9.0 / 8.0}));
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].r, 2.25, 1e-8);
  EXPECT_EQ(roots[0].multiplicity, 3);
  EXPECT_NEAR(roots[1].r, 20.25, 1e-8);
  EXPECT_EQ(roots[1].multiplicity, 1);
}

TEST(Roots, CuspUpperCircle) {
  const auto roots = positive_roots(build_q({kCuspA, 1.0, 9.0}));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0].r, 9.0, 1e-8);
  EXPECT_EQ(roots[0].multiplicity, 2);
}

TEST(Roots, CaseOneCircle) {
  const auto roots = positive_roots(build_q({-1.0, 0.0, c0()}));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0].r, std::pow(2.0, 2.0 / 3.0), 1e-8);
  EXPECT_EQ(roots[0].multiplicity, 2);
}

TEST(Roots, NoNegativeRoots) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ua(-3.0, 1.0), uc(-3.0, 10.0);
  for (int i = 0; i < 300; ++i) {
    const DropParams p{ua(rng), 1.0, uc(rng)};
    for (const auto& rr : all_real_roots(build_q(p))) EXPECT_GE(rr.value, -1e-8) << p.a << " " << p.C;
  }
  for (int i = 0; i < 100; ++i) {
    for (const auto& rr : all_real_roots(build_q({-1.0, 0.0, uc(rng)}))) EXPECT_GE(rr.value, -1e-8);
  }
}

TEST(Roots, ResidualsAndOrdering) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ua(-3.0, 0.29), uc(-2.0, 10.0);
  for (int i = 0; i < 300; ++i) {
    const DropParams p{ua(rng), 1.0, uc(rng)};
    const auto q = build_q(p);
    const auto roots = positive_roots(q);
    for (std::size_t j = 0; j < roots.size(); ++j) {
      EXPECT_LE(std::abs(q(roots[j].r)), 1e-8 * q.magnitude(roots[j].r));
      if (j > 0) {
        EXPECT_GT(roots[j].r, roots[j - 1].r);
      }
    }
  }
}

TEST(Circles, CuspRadii) {
  const auto c = circle_radii({kCuspA, 1.0, 0.0});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0].R, 3.0, 1e-8);
  EXPECT_EQ(c[0].orientation, -1);
  EXPECT_NEAR(c[1].R, 1.5, 1e-6);
  EXPECT_EQ(c[1].multiplicity, 2);
}

TEST(Circles, CaseOneRadius) {
  const auto c = circle_radii({-1.0, 0.0, 0.0});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].R, std::cbrt(2.0), 1e-12);
}

TEST(Circles, NegativeRotationSingleRadius) {
  const auto c = circle_radii({-2.0, 1.0, 0.0});
  ASSERT_EQ(c.size(), 1u);
  const double oracle = support::bisect([](double R) { return -2 * R * R * R - 2 * R + 2; }, 0.0, 1.0);
  EXPECT_NEAR(c[0].R, oracle, 1e-12);
  EXPECT_EQ(c[0].orientation, 1);
}

TEST(Circles, CurvatureBalance) {
  // ±1/R = 1 − aR²/2 with the recorded sign.
  for (double a : {-3.0, -1.0, -0.2, 0.05, 0.2, 0.29}) {
    for (const auto& c : circle_radii({a, 1.0, 0.0}))
      EXPECT_NEAR(c.orientation / c.R, 1.0 - a * c.R * c.R / 2.0, 1e-10) << a;
  }
}

TEST(CriticalLevels, PublishedValues) {
  EXPECT_NEAR(critical_level(-2.0, 1).C, -0.790706, 5e-6);
  EXPECT_NEAR(critical_level(0.2, 3).C, -0.698461, 5e-6);
  EXPECT_NEAR(critical_level(0.1, 2).C, -1.027962166, 1e-8);
}

TEST(CriticalLevels, Cusp) {
  const auto lv = critical_levels(kCuspA);
  ASSERT_EQ(lv.size(), 3u);
  EXPECT_NEAR(lv[0].C, 9.0, 1e-10);
  EXPECT_NEAR(lv[0].r, 9.0, 1e-10);
  EXPECT_NEAR(lv[1].C, -9.0 / 8.0, 1e-10);
  EXPECT_NEAR(lv[2].C, -9.0 / 8.0, 1e-10);
  EXPECT_NEAR(lv[1].r, 2.25, 1e-10);
  EXPECT_NEAR(lv[2].r, 2.25, 1e-10);
}

TEST(CriticalLevels, DoubleRootResiduals) {
  for (double a : {-5.0, -2.0, -1.0, -0.1, 0.05, 0.1, 0.2, 0.25, 0.29, 0.5, 2.0}) {
    for (const auto& lv : critical_levels(a)) {
      EXPECT_NEAR(a * lv.R * lv.R * lv.R - 2 * lv.R + 2, 0.0, 1e-10);
      EXPECT_NEAR(lv.r, lv.R * lv.R, 1e-12 * lv.r);
      const auto q = build_q({a, 1.0, lv.C});
      EXPECT_LE(std::abs(q(lv.r)), 1e-8 * q.magnitude(lv.r)) << a << " " << lv.index;
      EXPECT_LE(std::abs(q.derivative(lv.r)), 1e-8 * q.magnitude(lv.r) / lv.r) << a << " " << lv.index;
    }
  }
}

TEST(CriticalLevels, BranchAvailability) {
  EXPECT_EQ(critical_levels(-1.0).size(), 1u);
  EXPECT_EQ(critical_levels(0.5).size(), 1u);
  EXPECT_EQ(critical_levels(0.2).size(), 3u);
  try {
    critical_level(0.5, 2);
    FAIL();
  } catch (const DropError& e) {
    EXPECT_EQ(e.code(), ErrorCode::BranchUndefined);
  }
  try {
    critical_level(-1.0, 3);
    FAIL();
  } catch (const DropError& e) {
    EXPECT_EQ(e.code(), ErrorCode::BranchUndefined);
  }
  EXPECT_THROW(critical_level(0.0, 1), DropError);
}

TEST(Classify, NegativeRotationZeroLevel) {
  const auto l = classify({-2.0, 1.0, 0.0});
  EXPECT_EQ(l.region, Region::Omega1);
  EXPECT_EQ(l.tag, CaseTag::SingleBand);
  ASSERT_EQ(l.roots.size(), 2u);
  EXPECT_EQ(l.roots[0].multiplicity, 1);
  EXPECT_EQ(l.roots[1].multiplicity, 1);
}

TEST(Classify, TwoBandsFromOrigin) {
  const auto l = classify({0.1, 1.0, 0.0});
  EXPECT_EQ(l.region, Region::Omega2);
  EXPECT_EQ(l.tag, CaseTag::TwoBands);
  ASSERT_EQ(l.bands.size(), 2u);
  EXPECT_EQ(l.bands[0].r_lo, 0.0);
}

TEST(Classify, ExceptionalLevel) {
  const auto l = classify({0.2, 1.0, critical_level(0.2, 3).C});
  EXPECT_EQ(l.region, Region::Beta3);
  EXPECT_EQ(l.tag, CaseTag::Exceptional);
  EXPECT_EQ(l.circle_radii.size(), 1u);
  ASSERT_EQ(l.bands.size(), 2u);
  EXPECT_FALSE(l.bands[0].simple());
  EXPECT_FALSE(l.bands[1].simple());
}

TEST(Classify, SnapsNearCriticalLevel) {
  const double C3 = critical_level(0.2, 3).C;
  const auto l = classify({0.2, 1.0, C3 + 5e-11});
  EXPECT_EQ(l.region, Region::Beta3);
  EXPECT_EQ(l.params.C, C3);
}

TEST(Classify, CaseOne) {
  EXPECT_EQ(classify({-1.0, 0.0, -2.0}).tag, CaseTag::Empty);
  EXPECT_EQ(classify({-1.0, 0.0, -2.0}).region, Region::None);
  EXPECT_EQ(classify({-1.0, 0.0, c0()}).tag, CaseTag::CaseICircle);
  EXPECT_EQ(classify({-1.0, 0.0, 1.0}).tag, CaseTag::CaseIBand);
  EXPECT_EQ(classify({-1.0, 0.0, 1.0}).region, Region::CaseISemiline);
}

TEST(Classify, Cusp) {
  const auto l = classify({kCuspA, 1.0, -9.0 / 8.0});
  EXPECT_EQ(l.region, Region::SpecialPoint);
  EXPECT_EQ(l.tag, CaseTag::ExceptionalCusp);
}

TEST(Classify, ZeroRotationHasNote) {
  const auto l = classify({0.0, 1.0, 0.5});
  EXPECT_EQ(l.region, Region::None);
  EXPECT_FALSE(l.note.empty());
}

TEST(Classify, NonCanonicalRejected) {
  try {
    classify({-2.0, 0.0, 1.0});
    FAIL();
  } catch (const DropError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
  }
  EXPECT_THROW(classify({1.0, 1.0, std::nan("")}), DropError);
}

TEST(Classify, BoundaryLevels) {
  for (double a : {0.1, 0.2, 0.25}) {
    EXPECT_EQ(classify({a, 1.0, critical_level(a, 1).C}).region, Region::Beta1);
    EXPECT_EQ(classify({a, 1.0, critical_level(a, 1).C}).tag, CaseTag::CircleOnly);
    EXPECT_EQ(classify({a, 1.0, critical_level(a, 2).C}).tag, CaseTag::CircleAndBand);
    EXPECT_EQ(classify({a, 1.0, critical_level(a, 3).C}).tag, CaseTag::Exceptional);
  }
  EXPECT_EQ(classify({-1.0, 1.0, critical_level(-1.0, 1).C}).tag, CaseTag::CircleOnly);
}

TEST(Classify, RegionAgreesWithRoots) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ua(-3.0, 0.6), uc(-3.0, 12.0);
  for (int i = 0; i < 500; ++i) {
    const DropParams p{ua(rng), 1.0, uc(rng)};
    const auto l = classify(p);
    EXPECT_TRUE(region_matches_tag(l.region, l.tag))
        << p.a << " " << p.C << " " << to_string(l.region) << " " << to_string(l.tag);
  }
}

TEST(Classify, LocallyConstant) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ua(-3.0, 0.6), uc(-3.0, 12.0), sgn(-1.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 400; ++i) {
    const DropParams p{ua(rng), 1.0, uc(rng)};
    const auto base = classify(p).region;
    bool near_boundary = false;
    for (double da : {-2e-6, 0.0, 2e-6}) {
      if (p.a + da == 0.0) continue;
      for (const auto& lv : critical_levels(p.a + da)) near_boundary = near_boundary || std::abs(lv.C - p.C) < 1e-4;
    }
    if (near_boundary || std::abs(p.a - kCuspA) < 1e-4) continue;
    ++tested;
    const DropParams q{p.a + 1e-6 * sgn(rng), 1.0, p.C + 1e-6 * sgn(rng)};
    EXPECT_EQ(classify(q).region, base) << p.a << " " << p.C;
  }
  EXPECT_GT(tested, 300);
}

TEST(Rescale, ScalesLevelSetCoordinates) {
  // (ξ1, ξ2) -> λ(ξ1, ξ2) maps level C of (a, Λ0) to level λC of (a/λ³, Λ0/λ).
  const DropParams p{0.2, 1.0, 1.3};
  for (double lam : {0.5, 2.0, 3.7}) {
    const auto s = rescale(p, lam);
    EXPECT_DOUBLE_EQ(s.a, p.a / (lam * lam * lam));
    for (double x : {0.3, 1.1}) {
      for (double y : {-2.0, 0.4}) EXPECT_NEAR(eval_G(lam * x, lam * y, s), lam * eval_G(x, y, p), 1e-12 * (1 + lam));
    }
  }
}
