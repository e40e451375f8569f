#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace eulercalc;
using namespace ectest;

namespace {

PolyShape unit_square() {
  PolyShape h;
  h.add(square(0, 0, 1, 1), 1);
  return h;
}

Rational rnd(std::mt19937_64& rng, long long span, long long den) {
  return make_rational(static_cast<long long>(rng() % static_cast<std::uint64_t>(2 * span + 1)) - span, den);
}

KernelSpec disc(KernelKind k, long long r = 2) {
  KernelSpec s{k};
  s.disc_radius = make_rational(r);
  return s;
}

// Cone generators used throughout: opening strictly inside (0, pi).
KernelSpec cone() {
  KernelSpec s{KernelKind::Cone};
  s.cone_r1 = Vec2{1, 0};
  s.cone_r2 = Vec2{1, 2};
  return s;
}

}  // namespace

TEST(StandardPair, DeclaredConstants) {
  auto s = standard_pair(KernelKind::Sublevel);
  EXPECT_EQ(s.dual.kind, KernelKind::Superlevel);
  EXPECT_EQ(s.mu, 0);
  EXPECT_EQ(s.lambda, 1);
  EXPECT_EQ(standard_pair(KernelKind::Superlevel).dual.kind, KernelKind::Sublevel);
  EXPECT_EQ(standard_pair(KernelKind::Hyperplane).lambda, 1);
  EXPECT_EQ(standard_pair(KernelKind::DiscLevel).lambda, 2);
  EXPECT_EQ(standard_pair(KernelKind::Cone).mu, -1);
  EXPECT_EQ(standard_pair(KernelKind::Cone).lambda, 0);
  EXPECT_THROW(standard_pair(KernelKind::Blur), UnsupportedCombination);
}

TEST(KernelSpec, Validation) {
  KernelSpec c{KernelKind::Cone};
  c.cone_r2 = Vec2{-1, 0};
  EXPECT_THROW(c.validate(), StructuralError);
  KernelSpec d{KernelKind::DiscLevel};
  d.disc_radius = 0;
  EXPECT_THROW(d.validate(), StructuralError);
}

// ---------------------------------------------------------------------------
// Forward transform

TEST(Forward, SublevelTriangleInsideHalfPlane) {
  PolyShape h;
  h.add(Polygon({P(0, 0), P(2, 0), P(1, 1)}), 1);
  EXPECT_EQ(forward_eval(KernelSpec{KernelKind::Sublevel}, h, CylinderPoint{Vec2{0, 1}, make_rational(5)}), 1);
}

TEST(Forward, ConeOnPointMass) {
  PointMassShape h({PointMass{P(1, 1), 1}});
  const KernelSpec k{KernelKind::Cone};  // generators (1,0), (0,1)
  EXPECT_EQ(forward_eval(k, h, P(0, 0)), 1);
  EXPECT_EQ(forward_eval(k, h, P(2, 3)), 1);
  EXPECT_EQ(forward_eval(k, h, P(0, 2)), 0);
}

TEST(Forward, HyperplaneChordOfSquare) {
  auto h = unit_square();
  const CylinderPoint y{Vec2{1, 1}, make_rational(1)};
  EXPECT_EQ(forward_eval(KernelSpec{KernelKind::Hyperplane}, h, y), 1);
  // Closed chord rasterized as a thin band: the band is contractible.
  auto oracle = raster_integral(h, 32, [](const Point2& p) { return abs(p.x + p.y - 1) <= make_rational(1, 16); }, -1, -1, 2, 2);
  EXPECT_EQ(oracle, 1);
}

TEST(Forward, DiscKernelsRejectPolygons) {
  EXPECT_THROW(forward_eval(disc(KernelKind::DiscLevel), unit_square(), DiscPoint{0, 1}), UnsupportedCombination);
}

TEST(Forward, DiscKernelsOnPointMasses) {
  PointMassShape h({PointMass{P(0, 0), 3}, PointMass{P(1, 0), -1}});
  const auto k = disc(KernelKind::DiscSublevel);
  // Distances to (2, 0): 2 and 1.
  EXPECT_EQ(forward_eval(k, h, DiscPoint{0, 1.5}), -1);
  EXPECT_EQ(forward_eval(k, h, DiscPoint{0, 2.0}), 2);
  EXPECT_EQ(forward_eval(disc(KernelKind::DiscLevel), h, DiscPoint{0, 1.0}), -1);
  EXPECT_EQ(forward_eval(disc(KernelKind::DiscSuperlevel), h, DiscPoint{0, 1.5}), 3);
}

TEST(Forward, BlurWithPointFilterIsIdentity) {
  KernelSpec k{KernelKind::Blur};
  for (const auto& name : polygon_corpus_names()) {
    auto h = load_poly(name);
    for (const auto& y : {P(0, 0), P(1, 2, 1, 2), P(1, 0), P(-3, 1)}) {
      EXPECT_EQ(forward_eval(k, h, y), evaluate(h, y)) << name;
      EXPECT_EQ(ForwardOracle(k, h)(y), evaluate(h, y)) << name;
    }
  }
}

TEST(Forward, Linearity) {
  std::mt19937_64 rng(12);
  auto a = load_poly("star"), b = load_poly("two_squares");
  KernelSpec blur{KernelKind::Blur};
  blur.blur = ConvexPolygon({P(0, 0), P(1, 0), P(0, 1)});
  for (const KernelSpec& k : {KernelSpec{KernelKind::Sublevel}, KernelSpec{KernelKind::Hyperplane}, cone(), blur}) {
    for (int i = 0; i < 10; ++i) {
      YPoint y = is_cylinder_kind(k.kind)
                     ? YPoint{CylinderPoint{Vec2{rnd(rng, 3, 1) + 1, rnd(rng, 3, 1)}, rnd(rng, 8, 2)}}
                     : YPoint{Point2{rnd(rng, 8, 2), rnd(rng, 8, 2)}};
      EXPECT_EQ(forward_eval(k, a + b, y), forward_eval(k, a, y) + forward_eval(k, b, y)) << kernel_name(k.kind);
    }
  }
}

TEST(Forward, CompiledRouteMatchesSweepRoute) {
  std::mt19937_64 rng(21);
  KernelSpec blur{KernelKind::Blur};
  blur.blur = ConvexPolygon({P(0, 0), P(2, 0), P(1, 1)});
  for (const auto& name : polygon_corpus_names()) {
    auto h = load_poly(name);
    for (const KernelSpec& k : {KernelSpec{KernelKind::Sublevel}, KernelSpec{KernelKind::Superlevel},
                                KernelSpec{KernelKind::Hyperplane}, cone(), blur}) {
      ForwardOracle fast(k, h);
      for (int i = 0; i < 6; ++i) {
        YPoint y = is_cylinder_kind(k.kind)
                       ? YPoint{CylinderPoint{Vec2{rnd(rng, 2, 1), rnd(rng, 2, 1) + 3}, rnd(rng, 6, 2)}}
                       : YPoint{Point2{rnd(rng, 6, 2), rnd(rng, 6, 2)}};
        EXPECT_EQ(fast(y), forward_eval(k, h, y)) << name << " " << kernel_name(k.kind);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Kernel-pair integrals

TEST(KernelPair, SublevelDiagonalAndOffDiagonal) {
  auto pair = standard_pair(KernelKind::Sublevel);
  EXPECT_EQ(kernel_chi_pair(pair, P(0, 0), P(0, 0)), 0);
  EXPECT_EQ(kernel_chi_pair(pair, P(0, 0), P(1, 0)), 1);
}

TEST(KernelPair, SwappedSublevelPairHasSameConstants) {
  std::mt19937_64 rng(31);
  auto a = standard_pair(KernelKind::Sublevel), b = standard_pair(KernelKind::Superlevel);
  for (int i = 0; i < 30; ++i) {
    const Point2 x{rnd(rng, 5, 3), rnd(rng, 5, 2)}, xp{rnd(rng, 5, 3), rnd(rng, 5, 2)};
    const std::int64_t want = x == xp ? 0 : 1;
    EXPECT_EQ(kernel_chi_pair(a, x, xp), want);
    EXPECT_EQ(kernel_chi_pair(b, x, xp), want);
  }
}

// Lines through x on the double cover form a circle (chi 0); for x != x'
// exactly the two orientations of the joining line survive (2, halved to 1).
TEST(KernelPair, HyperplaneHandCount) {
  auto pair = standard_pair(KernelKind::Hyperplane);
  EXPECT_EQ(kernel_chi_pair(pair, P(1, 2), P(1, 2)), 0);
  EXPECT_EQ(kernel_chi_pair(pair, P(0, 0), P(3, -1)), 1);
}

TEST(KernelPair, DiscLevelConstants) {
  auto pair = standard_pair(disc(KernelKind::DiscLevel));
  EXPECT_EQ(kernel_chi_pair(pair, P(1, 2, 1, 3), P(1, 2, 1, 3)), 0);
  EXPECT_EQ(kernel_chi_pair(pair, P(0, 0), P(1, 0)), 2);
  EXPECT_EQ(kernel_chi_pair(pair, P(-1, 2, 1, 5), P(1, 3, -1, 1)), 2);
}

// {(theta, t) : d(x) <= t <= d(x')} on the boundary cylinder, rasterized
// with periodic columns. The region is a closed band over the arc where
// d(x) <= d(x'), so it is contractible.
TEST(KernelPair, DiscSublevelOffDiagonalMatchesPeriodicRaster) {
  const auto k = disc(KernelKind::DiscSublevel);
  auto pair = standard_pair(k);
  const std::vector<std::pair<Point2, Point2>> cases{{P(0, 0), P(1, 0)}, {P(1, 2, 1, 3), P(-1, 1, 1, 2)}, {P(0, 1), P(0, -1)}};
  for (const auto& [x, xp] : cases) {
    const std::size_t cols = 720, rows = 400;
    const double tmax = 4.0;
    auto keep = [&](std::size_t i, std::size_t j) {
      const double th = 2 * std::numbers::pi * (static_cast<double>(j) + 0.5) / cols;
      const double t = tmax * (static_cast<double>(i) + 0.5) / rows;
      const double dx = std::hypot(to_double(x.x) - 2 * std::cos(th), to_double(x.y) - 2 * std::sin(th));
      const double dxp = std::hypot(to_double(xp.x) - 2 * std::cos(th), to_double(xp.y) - 2 * std::sin(th));
      return dx <= t && t <= dxp;
    };
    const auto oracle = closed_pixel_chi(rows, cols, keep, true);
    EXPECT_EQ(oracle, 1);
    EXPECT_EQ(kernel_chi_pair(pair, x, xp), oracle);
  }
  EXPECT_EQ(kernel_chi_pair(pair, P(1, 2, 0, 1), P(1, 2, 0, 1)), 0);
}

// (x + D) n (x' + D) for the closed double cone D, by inclusion-exclusion
// over the four sector intersections.
TEST(KernelPair, ConeMatchesConvexInclusionExclusion) {
  const KernelSpec k = cone();
  auto pair = standard_pair(k);
  std::mt19937_64 rng(41);
  const Vec2 r1 = k.cone_r1, r2 = k.cone_r2;
  int inside = 0, outside = 0;
  for (int i = 0; i < 60; ++i) {
    const Point2 x{rnd(rng, 4, 1), rnd(rng, 4, 1)};
    const Point2 xp = i % 5 == 0 ? x : Point2{rnd(rng, 4, 1), rnd(rng, 4, 1)};
    std::vector<ConvexSet> pieces;
    for (int sa : {1, -1})
      for (int sb : {1, -1}) {
        ConvexSet s = sector(x, Rational(sa) * r1, Rational(sa) * r2);
        ConvexSet t = sector(xp, Rational(sb) * r1, Rational(sb) * r2);
        s.insert(s.end(), t.begin(), t.end());
        pieces.push_back(s);
      }
    const std::int64_t oracle = chi_c_union(pieces);
    EXPECT_EQ(kernel_chi_pair(pair, x, xp), oracle) << x << " " << xp;
    // Both sides also agree on the closed form: -1 when x' - x lies in D.
    EXPECT_EQ(oracle, DoubleCone(x, r1, r2).contains(xp) ? -1 : 0);
    (DoubleCone(x, r1, r2).contains(xp) ? inside : outside)++;
  }
  EXPECT_GT(inside, 12);
  EXPECT_GT(outside, 0);
}

TEST(KernelPair, RandomPairsMatchDeclaredConstantsWhereTheyHold) {
  std::mt19937_64 rng(99);
  for (KernelKind kind : {KernelKind::Sublevel, KernelKind::Superlevel, KernelKind::Hyperplane}) {
    auto pair = standard_pair(kind);
    for (int i = 0; i < 40; ++i) {
      const Point2 x{rnd(rng, 9, 4), rnd(rng, 9, 3)}, xp{rnd(rng, 9, 4), rnd(rng, 9, 3)};
      EXPECT_EQ(kernel_chi_pair(pair, x, x), pair.mu);
      if (!(x == xp)) {
        EXPECT_EQ(kernel_chi_pair(pair, x, xp), pair.lambda);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Composite transform and inversion

TEST(Composite, SublevelSquare) {
  auto pair = standard_pair(KernelKind::Sublevel);
  auto h = unit_square();
  EXPECT_EQ(composite_eval(pair, h, P(1, 2, 1, 2)), 0);
  EXPECT_EQ(composite_eval(pair, h, P(3, 0)), 1);
}

TEST(Composite, ConeSquareInterior) {
  auto pair = standard_pair(cone());
  EXPECT_EQ(composite_eval(pair, unit_square(), P(1, 2, 1, 2)), -1);
}

// The composite kernel for the closed double cone is -1 on D and 0
// elsewhere, so the composite is -R_D h. Checked against the forward
// transform computed by an independent route (plane sweep).
TEST(Composite, ConeCompositeIsNegatedConeTransform) {
  const KernelSpec k = cone();
  auto pair = standard_pair(k);
  for (const char* name : {"unit_square", "l_shape", "two_squares"}) {
    auto h = load_poly(name);
    for (const auto& x : {P(1, 2, 1, 2), P(-1, 0), P(2, 2), P(1, 1, 1, 3)})
      EXPECT_EQ(composite_eval(pair, h, x), -forward_eval(k, h, x, {})) << name << " " << x;
  }
}

TEST(Composite, SweepAndCompiledRoutesAgree) {
  for (KernelKind kind : {KernelKind::Sublevel, KernelKind::Hyperplane}) {
    auto pair = standard_pair(kind);
    auto h = load_poly("l_shape");
    for (const auto& x : {P(1, 2, 1, 2), P(1, 1), P(3, 3), P(2, 0)})
      EXPECT_EQ(composite_eval(pair, h, x, {}, ForwardRoute::Sweep), composite_eval(pair, h, x)) << kernel_name(kind);
  }
  auto pair = standard_pair(cone());
  auto h = unit_square();
  for (const auto& x : {P(1, 2, 1, 2), P(2, 0)})
    EXPECT_EQ(composite_eval(pair, h, x, {}, ForwardRoute::Sweep), composite_eval(pair, h, x));
}

TEST(Composite, HyperplaneAuditedSweep) {
  TransformOptions o;
  o.sweep.audit = true;
  auto pair = standard_pair(KernelKind::Hyperplane);
  auto h = load_poly("film");
  EXPECT_EQ(composite_eval(pair, h, P(3, 2, 3, 2), o), composite_eval(pair, h, P(3, 2, 3, 2)));
}

TEST(Invert, SublevelSquareInteriorAndBoundary) {
  auto pair = standard_pair(KernelKind::Sublevel);
  auto h = unit_square();
  const auto box = *support_box(h);
  EXPECT_EQ(invert_at(pair, h, P(1, 2, 1, 2), box), 1);
  EXPECT_EQ(invert_at(pair, h, P(1, 1, 1, 2), box), 1);
  EXPECT_EQ(invert_at(pair, h, P(0, 0), box), 1);
  EXPECT_EQ(invert_at(pair, h, P(2, 0), box), 0);
}

TEST(Invert, NonInvertiblePairIsRejected) {
  auto pair = standard_pair(KernelKind::Sublevel);
  pair.mu = pair.lambda;
  auto h = unit_square();
  EXPECT_THROW(invert_at(pair, h, P(0, 0), *support_box(h)), NonInvertibleKernel);
}

TEST(Invert, InexactDivisionIsSurfaced) {
  auto pair = standard_pair(KernelKind::Sublevel);
  pair.mu = 2;
  pair.lambda = 0;
  PolyShape h;
  h.add(square(0, 0, 1, 1), 1);
  // composite at an outside point is 1, and 1 / (2 - 0) is not an integer.
  EXPECT_THROW(invert_at(pair, h, P(5, 5), *support_box(h)), ExactDivisionError);
}

TEST(Reconstruct, UnitSquareGrid) {
  auto rep = reconstruct_grid(standard_pair(KernelKind::Sublevel), unit_square(), GridSpec{});
  EXPECT_EQ(rep.points.size(), 81u);
  EXPECT_EQ(rep.exact_matches, 81u);
  EXPECT_TRUE(rep.mismatches.empty());
}

TEST(Reconstruct, EmptyShapeGivesZeros) {
  auto rep = reconstruct_grid(standard_pair(KernelKind::Sublevel), PolyShape{}, GridSpec{});
  EXPECT_TRUE(rep.all_exact());
  for (auto v : rep.recovered) EXPECT_EQ(v, 0);
}

TEST(Reconstruct, LShapeSublevelAndHyperplane) {
  GridSpec g;
  g.window = BoundingBox{make_rational(-1), make_rational(-1), make_rational(3), make_rational(3)};
  g.extra_random = 10;
  g.include_features = true;
  for (KernelKind kind : {KernelKind::Sublevel, KernelKind::Superlevel, KernelKind::Hyperplane}) {
    auto rep = reconstruct_grid(standard_pair(kind), load_poly("l_shape"), g);
    EXPECT_TRUE(rep.all_exact()) << kernel_name(kind) << " " << rep.exact_matches << "/" << rep.points.size();
  }
}

TEST(Reconstruct, ConsistentCounts) {
  GridSpec g;
  g.nx = 5;
  g.ny = 4;
  auto rep = reconstruct_grid(standard_pair(cone()), load_poly("two_squares"), g);
  EXPECT_EQ(rep.points.size(), 20u);
  EXPECT_EQ(rep.exact_matches + rep.mismatches.size(), rep.points.size());
}

TEST(Reconstruct, DiscSublevelPointMasses) {
  GridSpec g;
  g.window = BoundingBox{make_rational(-2), make_rational(-2), make_rational(2), make_rational(2)};
  g.include_features = true;
  g.extra_random = 10;
  g.seed = 3;
  for (const auto& name : point_corpus_names()) {
    auto h = load_points(name);
    for (KernelKind kind : {KernelKind::DiscSublevel, KernelKind::DiscSuperlevel, KernelKind::DiscLevel}) {
      auto rep = reconstruct_grid(standard_pair(disc(kind)), h, g);
      EXPECT_TRUE(rep.all_exact()) << name << " " << kernel_name(kind);
    }
  }
}

TEST(Reconstruct, RandomPointsAreSeeded) {
  GridSpec g;
  g.nx = g.ny = 1;
  g.extra_random = 5;
  g.seed = 17;
  auto a = query_points(standard_pair(KernelKind::Sublevel), unit_square(), g);
  auto b = query_points(standard_pair(KernelKind::Sublevel), unit_square(), g);
  EXPECT_EQ(a, b);
  g.seed = 18;
  EXPECT_NE(query_points(standard_pair(KernelKind::Sublevel), unit_square(), g), a);
}

// ---------------------------------------------------------------------------
// Profiles

TEST(Profile, TriangleFourByFour) {
  PolyShape h;
  h.add(Polygon({P(0, 0), P(3, 0), P(1, 2)}), 1);
  auto p = export_profile(KernelSpec{KernelKind::Sublevel}, h, 4, 4);
  ASSERT_EQ(p.values.size(), 4u);
  for (const auto& row : p.values) {
    ASSERT_EQ(row.size(), 4u);
    for (auto v : row) EXPECT_TRUE(v == 0 || v == 1);
    EXPECT_EQ(row.front(), 0);
    EXPECT_EQ(row.back(), 1);
  }
  EXPECT_EQ(p.critical_curves.size(), 3u);
}

TEST(Profile, ValuesMatchForwardEval) {
  auto h = load_poly("overlap");
  KernelSpec k{KernelKind::Hyperplane};
  auto p = export_profile(k, h, 5, 7);
  for (std::size_t i = 0; i < p.thetas.size(); ++i)
    for (std::size_t j = 0; j < p.ts.size(); ++j)
      EXPECT_EQ(p.values[i][j], forward_eval(k, h, CylinderPoint{direction_from_angle(p.thetas[i]), rational_from_double(p.ts[j])}));
}

TEST(Profile, ExtremeColumns) {
  for (const auto& name : polygon_corpus_names()) {
    auto h = load_poly(name);
    auto p = export_profile(KernelSpec{KernelKind::Sublevel}, h, 16, 3);
    for (const auto& row : p.values) {
      EXPECT_EQ(row.front(), 0) << name;
      EXPECT_EQ(row.back(), shape_integral(h)) << name;
    }
  }
}

TEST(Profile, PlaneKernelsAreRejected) {
  EXPECT_THROW(export_profile(cone(), unit_square(), 4, 4), UnsupportedCombination);
  EXPECT_THROW(export_profile(KernelSpec{KernelKind::Sublevel}, unit_square(), 0, 4), StructuralError);
}

TEST(Profile, DiscOnPointMasses) {
  auto h = load_points("points_cluster");
  auto p = export_profile(disc(KernelKind::DiscSublevel), h, 6, 5);
  for (const auto& row : p.values) EXPECT_EQ(row.back(), shape_integral(h));
}
