#pragma once

// Shared fixtures and brute-force oracles for the test binaries. Nothing in
// here calls the sweep engine.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eulercalc/eulercalc.hpp"
#include "eulercalc/io.hpp"

#ifndef EC_DATA_DIR
#error "EC_DATA_DIR must point at data/shapes"
#endif

namespace ectest {

using namespace eulercalc;

inline const std::vector<std::string>& polygon_corpus_names() {
  static const std::vector<std::string> names{"unit_square", "triangle", "l_shape", "star",      "two_squares", "annulus",
                                              "film",        "overlap",  "u_shape", "collinear", "separated",   "chevron"};
  return names;
}

inline const std::vector<std::string>& point_corpus_names() {
  static const std::vector<std::string> names{"points_pair", "points_cluster", "points_ring"};
  return names;
}

inline Shape load(const std::string& name) { return io::load_shape(std::string(EC_DATA_DIR) + "/" + name + ".json"); }

inline PolyShape load_poly(const std::string& name) { return std::get<PolyShape>(load(name)); }
inline PointMassShape load_points(const std::string& name) { return std::get<PointMassShape>(load(name)); }

inline Point2 P(long long x, long long y) { return Point2{make_rational(x), make_rational(y)}; }
inline Point2 P(long long xn, long long xd, long long yn, long long yd) {
  return Point2{make_rational(xn, xd), make_rational(yn, yd)};
}

inline Polygon square(long long x0, long long y0, long long x1, long long y1) {
  return Polygon({P(x0, y0), P(x1, y0), P(x1, y1), P(x0, y1)});
}

/// Euler integral of a set read as a union of closed pixels on a fine
/// grid: pixel (i, j) is kept when `keep` holds at its centre. Computed as
/// V - E + F of the closure, counting cells directly.
inline std::int64_t closed_pixel_chi(std::size_t rows, std::size_t cols,
                                     const std::function<bool(std::size_t, std::size_t)>& keep, bool periodic_cols) {
  std::set<std::pair<std::size_t, std::size_t>> verts, hedges, vedges;
  std::int64_t faces = 0;
  auto wrap = [&](std::size_t j) { return periodic_cols ? j % cols : j; };
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (!keep(i, j)) continue;
      ++faces;
      for (std::size_t di = 0; di < 2; ++di)
        for (std::size_t dj = 0; dj < 2; ++dj) verts.insert({i + di, wrap(j + dj)});
      hedges.insert({i, j});
      hedges.insert({i + 1, j});
      vedges.insert({i, wrap(j)});
      vedges.insert({i, wrap(j + 1)});
    }
  return static_cast<std::int64_t>(verts.size()) - static_cast<std::int64_t>(hedges.size() + vedges.size()) + faces;
}

/// Rasterization oracle for sum_i w_i * chi(P_i n S): each term is rasterized
/// separately at `per_unit` pixels per unit over `box`, and `in_set` is the
/// extra closed constraint S (tested at pixel centres, like the polygon).
inline std::int64_t raster_integral(const PolyShape& h, int per_unit, const std::function<bool(const Point2&)>& in_set,
                                    long long x0, long long y0, long long x1, long long y1) {
  const std::size_t cols = static_cast<std::size_t>((x1 - x0) * per_unit);
  const std::size_t rows = static_cast<std::size_t>((y1 - y0) * per_unit);
  std::int64_t total = 0;
  for (const auto& t : h.terms) {
    auto keep = [&](std::size_t i, std::size_t j) {
      const Point2 c{make_rational(x0) + make_rational(2 * static_cast<long long>(j) + 1, 2 * per_unit),
                     make_rational(y0) + make_rational(2 * static_cast<long long>(i) + 1, 2 * per_unit)};
      return t.polygon.contains(c) && in_set(c);
    };
    total += t.weight * closed_pixel_chi(rows, cols, keep, false);
  }
  return total;
}

/// chi_c of a finite union of closed convex polyhedral sets in the plane
/// containing no line, each given by half-planes {p : a . p <= b}. Uses
/// inclusion-exclusion: a nonempty intersection contributes 1 when bounded
/// and 0 when unbounded.
struct HalfPlane {
  Vec2 a;
  Rational b;
};
using ConvexSet = std::vector<HalfPlane>;

inline bool satisfies(const ConvexSet& s, const Point2& p) {
  for (const auto& hp : s)
    if (dot(hp.a, p) > hp.b) return false;
  return true;
}

/// Returns {nonempty, bounded} for a line-free closed polyhedral set.
inline std::pair<bool, bool> classify(const ConvexSet& s) {
  // A nonempty line-free polyhedron has a vertex: some pair of boundary
  // lines meets at a feasible point.
  bool nonempty = false;
  for (std::size_t i = 0; i < s.size() && !nonempty; ++i)
    for (std::size_t j = i + 1; j < s.size() && !nonempty; ++j) {
      const Rational det = cross(s[i].a, s[j].a);
      if (sgn(det) == 0) continue;
      const Point2 p{(s[i].b * s[j].a.y - s[j].b * s[i].a.y) / det, (s[i].a.x * s[j].b - s[j].a.x * s[i].b) / det};
      nonempty = satisfies(s, p);
    }
  if (!nonempty) return {false, false};
  // Bounded iff the recession cone {d : a . d <= 0 for all} is {0}. Its
  // extreme rays are among the directions along boundary lines.
  for (const auto& hp : s)
    for (const Vec2& d : {perp(hp.a), -perp(hp.a)}) {
      bool rec = true;
      for (const auto& g : s)
        if (sgn(dot(g.a, d)) > 0) rec = false;
      if (rec) return {true, false};
    }
  return {true, true};
}

inline std::int64_t chi_c_union(const std::vector<ConvexSet>& pieces) {
  const std::size_t n = pieces.size();
  std::int64_t total = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    ConvexSet inter;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        inter.insert(inter.end(), pieces[i].begin(), pieces[i].end());
        ++bits;
      }
    auto [nonempty, bounded] = classify(inter);
    if (nonempty && bounded) total += (bits % 2 == 1) ? 1 : -1;
  }
  return total;
}

/// Closed sector apex + {a r1 + b r2 : a, b >= 0}, cross(r1, r2) > 0.
inline ConvexSet sector(const Point2& apex, const Vec2& r1, const Vec2& r2) {
  // cross(q, r2) >= 0 and cross(r1, q) >= 0 for q = p - apex.
  const Vec2 n1{-r2.y, r2.x};
  const Vec2 n2{r1.y, -r1.x};
  return ConvexSet{HalfPlane{n1, dot(n1, apex)}, HalfPlane{n2, dot(n2, apex)}};
}

}  // namespace ectest
