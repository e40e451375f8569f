#pragma once

// Fast exact slices of a PolyShape by closed convex sets.
//
// For a triangulated closed polygon P (no Steiner points) and a closed
// convex set C, every closed simplex meets C in a convex set, so
//
//   chi(P n C) = #{triangles meeting C} - #{diagonals meeting C}.
//
// Boundary vertices and boundary edges drop out of the alternating sum over
// their stars. Only incidence tests are needed, which makes this route much
// cheaper than a plane sweep; it is used wherever a transform must be
// evaluated at many points.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "eulercalc/rational.hpp"
#include "eulercalc/shapes2d.hpp"

namespace eulercalc {

class TriangulatedShape {
 public:
  explicit TriangulatedShape(const PolyShape& h) {
    terms_.reserve(h.terms.size());
    for (const auto& t : h.terms) terms_.push_back(Term{t.polygon, triangulate(t.polygon), t.weight});
  }

  std::int64_t value_at(const Point2& x) const {
    std::int64_t v = 0;
    for (const auto& t : terms_)
      if (t.polygon.contains(x)) v += t.weight;
    return v;
  }

  std::int64_t integral() const {
    std::int64_t s = 0;
    for (const auto& t : terms_) s += t.weight;
    return s;
  }

  /// Integral over {x . d <= t} (sublevel) or {x . d >= t}.
  std::int64_t halfplane(const Vec2& d, const Rational& t, bool sublevel) const {
    return accumulate([&](const Point2& v) {
      const int s = sgn(dot(v, d) - t);
      return sublevel ? s <= 0 : s >= 0;
    });
  }

  /// Integral over the line {x . d = t}.
  std::int64_t line(const Vec2& d, const Rational& t) const {
    std::int64_t total = 0;
    for (const auto& term : terms_) {
      std::vector<signed char> side(term.polygon.size());
      for (std::size_t i = 0; i < side.size(); ++i) side[i] = static_cast<signed char>(sgn(dot(term.polygon[i], d) - t));
      auto straddles = [&](std::initializer_list<std::size_t> ids) {
        int lo = 1, hi = -1;
        for (std::size_t i : ids) {
          lo = std::min<int>(lo, side[i]);
          hi = std::max<int>(hi, side[i]);
        }
        return lo <= 0 && hi >= 0;
      };
      std::int64_t chi = 0;
      for (const auto& tr : term.tri.triangles) chi += straddles({tr[0], tr[1], tr[2]});
      for (const auto& dg : term.tri.diagonals) chi -= straddles({dg[0], dg[1]});
      total += term.weight * chi;
    }
    return total;
  }

  /// Integral over the closed convex sector apex + {a r1 + b r2 : a, b >= 0}
  /// with cross(r1, r2) > 0.
  std::int64_t sector(const Point2& apex, const Vec2& r1, const Vec2& r2) const {
    std::int64_t total = 0;
    for (const auto& term : terms_) {
      const std::size_t n = term.polygon.size();
      std::vector<Rational> alpha(n), beta(n);
      for (std::size_t i = 0; i < n; ++i) {
        Vec2 q = term.polygon[i] - apex;
        alpha[i] = cross(q, r2);
        beta[i] = cross(r1, q);
      }
      std::int64_t chi = 0;
      for (const auto& tr : term.tri.triangles)
        chi += segment_meets_sector(alpha, beta, tr[0], tr[1]) || segment_meets_sector(alpha, beta, tr[1], tr[2]) ||
               segment_meets_sector(alpha, beta, tr[2], tr[0]);
      for (const auto& dg : term.tri.diagonals) chi -= segment_meets_sector(alpha, beta, dg[0], dg[1]);
      total += term.weight * chi;
    }
    return total;
  }

  /// Integral over a closed double cone: the two sectors meet only at the
  /// apex.
  std::int64_t double_cone(const DoubleCone& c) const {
    return sector(c.apex(), c.r1(), c.r2()) + sector(c.apex(), -c.r1(), -c.r2()) - value_at(c.apex());
  }

  /// Integral over a compact convex set given by its vertices.
  std::int64_t convex(const std::vector<Point2>& region) const {
    std::int64_t total = 0;
    std::vector<Point2> simplex;
    for (const auto& term : terms_) {
      std::int64_t chi = 0;
      for (const auto& tr : term.tri.triangles) {
        simplex = {term.polygon[tr[0]], term.polygon[tr[1]], term.polygon[tr[2]]};
        chi += convex_sets_intersect(simplex, region);
      }
      for (const auto& dg : term.tri.diagonals) {
        simplex = {term.polygon[dg[0]], term.polygon[dg[1]]};
        chi -= convex_sets_intersect(simplex, region);
      }
      total += term.weight * chi;
    }
    return total;
  }

 private:
  struct Term {
    Polygon polygon;
    Triangulation tri;
    std::int64_t weight;
  };

  template <class InSet>
  std::int64_t accumulate(InSet&& in_set) const {
    std::int64_t total = 0;
    for (const auto& term : terms_) {
      std::vector<char> flag(term.polygon.size());
      for (std::size_t i = 0; i < flag.size(); ++i) flag[i] = in_set(term.polygon[i]);
      std::int64_t chi = 0;
      for (const auto& tr : term.tri.triangles) chi += flag[tr[0]] || flag[tr[1]] || flag[tr[2]];
      for (const auto& dg : term.tri.diagonals) chi -= flag[dg[0]] || flag[dg[1]];
      total += term.weight * chi;
    }
    return total;
  }

  /// Closed segment between vertices i and j against the sector, using the
  /// cached cone coordinates.
  static bool segment_meets_sector(const std::vector<Rational>& alpha, const std::vector<Rational>& beta,
                                   std::size_t i, std::size_t j) {
    const int ai = sgn(alpha[i]), bi = sgn(beta[i]);
    const int aj = sgn(alpha[j]), bj = sgn(beta[j]);
    if ((ai >= 0 && bi >= 0) || (aj >= 0 && bj >= 0)) return true;
    if (bi * bj < 0) {
      // Crossing of the ray {beta = 0, alpha >= 0}.
      const int num = sgn(alpha[i] * beta[j] - alpha[j] * beta[i]);
      const int den = sgn(beta[j] - beta[i]);
      if (num * den >= 0) return true;
    }
    if (ai * aj < 0) {
      // Crossing of the ray {alpha = 0, beta >= 0}.
      const int num = sgn(beta[i] * alpha[j] - beta[j] * alpha[i]);
      const int den = sgn(alpha[j] - alpha[i]);
      if (num * den >= 0) return true;
    }
    return false;
  }

  std::vector<Term> terms_;
};

}  // namespace eulercalc
