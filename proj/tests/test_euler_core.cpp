#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"

using namespace eulercalc;
using namespace ectest;

namespace {

std::shared_ptr<const FiniteCellComplex> make_complex(const std::vector<int>& dims) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < dims.size(); ++i) cells.push_back(Cell{CellId{i}, dims[i]});
  return std::make_shared<const FiniteCellComplex>(cells, 2);
}

ConstructibleFn ones(const std::vector<int>& dims) {
  auto c = make_complex(dims);
  return ConstructibleFn(c, std::vector<std::int64_t>(dims.size(), 1));
}

// Direct alternating sum, written independently of euler_integral.
std::int64_t direct_sum(const ConstructibleFn& f) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < f.complex().size(); ++i) {
    std::int64_t sign = 1;
    for (int d = 0; d < f.complex().cells()[i].dim; ++d) sign = -sign;
    s += sign * f.weight_at(i);
  }
  return s;
}

}  // namespace

TEST(EulerIntegral, ClosedSquareIsOne) { EXPECT_EQ(euler_integral(ones({0, 0, 0, 0, 1, 1, 1, 1, 2})), 1); }

TEST(EulerIntegral, OpenTwoCellIsOne) { EXPECT_EQ(euler_integral(ones({2})), 1); }

TEST(EulerIntegral, CircleIsZero) { EXPECT_EQ(euler_integral(ones({0, 0, 0, 0, 1, 1, 1, 1})), 0); }

TEST(EulerIntegral, OpenEdgeIsMinusOne) { EXPECT_EQ(euler_integral(ones({1})), -1); }

TEST(CellComplex, RejectsDuplicateIds) {
  EXPECT_THROW(FiniteCellComplex({Cell{CellId{1}, 0}, Cell{CellId{1}, 1}}), StructuralError);
}

TEST(CellComplex, RejectsDimensionAboveAmbient) {
  EXPECT_THROW(FiniteCellComplex({Cell{CellId{1}, 3}}, 2), StructuralError);
  EXPECT_THROW(FiniteCellComplex({Cell{CellId{1}, -1}}, 2), StructuralError);
}

TEST(ConstructibleFn, LookupByIdAndDefaultZero) {
  auto c = make_complex({0, 1, 2});
  ConstructibleFn f(c);
  EXPECT_EQ(euler_integral(f), 0);
  auto g = f.with_weight(CellId{2}, 5);
  EXPECT_EQ(g.weight(CellId{2}), 5);
  EXPECT_EQ(f.weight(CellId{2}), 0);
  EXPECT_THROW(f.weight(CellId{9}), StructuralError);
}

TEST(PointwiseOps, AddZeroIsIdentity) {
  auto c = make_complex({0, 1, 1, 2});
  ConstructibleFn f(c, {3, -1, 2, 7});
  ConstructibleFn zero(c);
  EXPECT_EQ((f + zero).weights(), f.weights());
}

TEST(PointwiseOps, MismatchedComplexesThrow) {
  ConstructibleFn f(make_complex({0}), {1});
  ConstructibleFn g(make_complex({0}), {1});
  EXPECT_THROW(f + g, StructuralError);
}

TEST(PointwiseOps, NegationFlipsIntegral) {
  auto c = make_complex({0, 1, 1, 2, 2});
  ConstructibleFn f(c, {4, 1, -3, 2, 2});
  EXPECT_EQ(euler_integral((-1) * f), -euler_integral(f));
}

TEST(PointwiseOps, LinearityOnRandomCubicalFunctions) {
  CubicalGrid g(5, 5);
  auto c = g.complex();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> a(g.cell_count()), b(g.cell_count());
    for (auto& x : a) x = static_cast<std::int64_t>(rng() % 7) - 3;
    for (auto& x : b) x = static_cast<std::int64_t>(rng() % 7) - 3;
    ConstructibleFn f(c, a), h(c, b);
    EXPECT_EQ(euler_integral(f + h), direct_sum(f) + direct_sum(h));
    EXPECT_EQ(euler_integral(3 * f), 3 * direct_sum(f));
  }
}

TEST(CubicalMask, SinglePixel) { EXPECT_EQ(euler_integral(cubical_from_mask({{1}})), 1); }

TEST(CubicalMask, TwoPixelRectangle) { EXPECT_EQ(euler_integral(cubical_from_mask({{1, 1}})), 1); }

TEST(CubicalMask, RingIsZero) {
  // 16 vertices - 24 edges + 8 squares, counted by hand on the closed ring.
  EXPECT_EQ(euler_integral(cubical_from_mask({{1, 1, 1}, {1, 0, 1}, {1, 1, 1}})), 16 - 24 + 8);
}

TEST(CubicalMask, EmptyGridThrows) {
  EXPECT_THROW(cubical_from_mask({}), StructuralError);
  EXPECT_THROW(cubical_from_mask({{}}), StructuralError);
  EXPECT_THROW(cubical_from_mask({{1, 1}, {1}}), StructuralError);
}

TEST(CubicalMask, MaxRuleOnSharedFaces) {
  auto f = cubical_from_mask({{2, 5}});
  CubicalGrid g(1, 2);
  EXPECT_EQ(f.weight(CellId{g.vedge(0, 1)}), 5);
  EXPECT_EQ(f.weight(CellId{g.vertex(0, 0)}), 2);
  EXPECT_EQ(f.weight(CellId{g.square(0, 0)}), 2);
}

TEST(CubicalMask, AllOnesGridsAreContractible) {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t n = 1; n <= 6; ++n) {
      std::vector<std::vector<std::int64_t>> grid(m, std::vector<std::int64_t>(n, 1));
      EXPECT_EQ(euler_integral(cubical_from_mask(grid)), 1) << m << "x" << n;
    }
}

TEST(CubicalMask, AgreesWithIndependentPixelCount) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + rng() % 7, n = 1 + rng() % 7;
    std::vector<std::vector<std::int64_t>> grid(m, std::vector<std::int64_t>(n));
    for (auto& row : grid)
      for (auto& v : row) v = static_cast<std::int64_t>(rng() % 2);
    const std::int64_t oracle = closed_pixel_chi(m, n, [&](std::size_t i, std::size_t j) { return grid[i][j] == 1; }, false);
    EXPECT_EQ(euler_integral(cubical_from_mask(grid)), oracle);
  }
}

TEST(Additivity, RandomClosedSubcomplexes) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 8, cols = 1 + rng() % 8;
    CubicalGrid g(rows, cols);
    auto cx = g.complex();
    std::vector<bool> a(g.cell_count()), b(g.cell_count());
    for (std::size_t c = 0; c < a.size(); ++c) {
      a[c] = rng() % 4 == 0;
      b[c] = rng() % 4 == 0;
    }
    a = g.closure(a);
    b = g.closure(b);
    std::vector<bool> u(a.size()), n(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) {
      u[c] = a[c] || b[c];
      n[c] = a[c] && b[c];
    }
    const auto chi = [&](const std::vector<bool>& s) { return euler_integral(indicator(g, cx, s)); };
    EXPECT_EQ(chi(u) + chi(n), chi(a) + chi(b));
  }
}

TEST(Labeling, PermutingIdsKeepsIntegral) {
  std::mt19937_64 rng(3);
  CubicalGrid g(4, 3);
  std::vector<std::int64_t> w(g.cell_count());
  for (auto& x : w) x = static_cast<std::int64_t>(rng() % 5) - 2;
  ConstructibleFn f(g.complex(), w);

  std::vector<std::size_t> perm(g.cell_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Cell> cells;
  std::vector<std::int64_t> w2;
  for (std::size_t k : perm) {
    cells.push_back(Cell{CellId{1000 + k * 7}, g.dim_of(k)});
    w2.push_back(w[k]);
  }
  ConstructibleFn f2(std::make_shared<const FiniteCellComplex>(cells, 2), w2);
  EXPECT_EQ(euler_integral(f2), euler_integral(f));
}

TEST(Triangulation, ComplexOfEachCorpusPolygonIsContractible) {
  for (const auto& name : polygon_corpus_names())
    for (const auto& t : load_poly(name).terms) {
      auto f = triangulated_complex(t.polygon, t.weight);
      EXPECT_EQ(euler_integral(f), t.weight) << name;
    }
}
