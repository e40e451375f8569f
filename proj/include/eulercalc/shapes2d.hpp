#pragma once

// Piecewise-linear constructible functions on R^2: weighted sums of closed
// simple polygons with exact rational vertices, plus finite point masses.

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eulercalc/errors.hpp"
#include "eulercalc/euler_core.hpp"
#include "eulercalc/rational.hpp"
#include "eulercalc/sweep.hpp"

namespace eulercalc {

/// True when the closed segments [a, b] and [c, d] share a point.
inline bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  return on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d);
}

inline Rational twice_signed_area(const std::vector<Point2>& v) {
  Rational s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return s;
}

/// Closed simple polygon, stored counter-clockwise. Collinear consecutive
/// vertices are allowed; zero-area or self-intersecting input is rejected.
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw StructuralError("polygon needs at least 3 vertices");
    const Rational area2 = twice_signed_area(vertices_);
    if (sgn(area2) == 0) throw StructuralError("polygon has zero area");
    if (sgn(area2) < 0) std::reverse(vertices_.begin(), vertices_.end());
    check_simple();
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  const Point2& next(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

  /// Closed containment: boundary points count as inside.
  bool contains(const Point2& p) const {
    const std::size_t n = vertices_.size();
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = vertices_[i];
      const Point2& b = next(i);
      if (on_segment(p, a, b)) return true;
      if ((a.y > p.y) != (b.y > p.y)) {
        // Edge straddles the horizontal through p: crossing is right of p
        // when p is on the inner side of the upward-oriented edge.
        const int o = orientation(a, b, p);
        if ((b.y > a.y) ? (o > 0) : (o < 0)) inside = !inside;
      }
    }
    return inside;
  }

 private:
  void check_simple() const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (vertices_[i] == next(i)) throw StructuralError("polygon has repeated consecutive vertices");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = vertices_[i];
      const Point2& b = next(i);
      // Next edge folding back onto this one.
      const Point2& c = vertices_[(i + 2) % n];
      if (orientation(a, b, c) == 0 && sgn(dot(b - a, c - b)) < 0) throw StructuralError("polygon edges overlap");
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
        if (segments_intersect(a, b, vertices_[j], next(j)))
          throw StructuralError("polygon is not simple");
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (vertices_[i] == vertices_[j]) throw StructuralError("polygon repeats a vertex");
  }

  std::vector<Point2> vertices_;
};

struct PolyTerm {
  Polygon polygon;
  std::int64_t weight = 1;
};

/// h = sum of weight_i * indicator(closed polygon_i).
struct PolyShape {
  std::vector<PolyTerm> terms;

  PolyShape& add(Polygon p, std::int64_t w) {
    terms.push_back(PolyTerm{std::move(p), w});
    return *this;
  }
  bool empty() const { return terms.empty(); }
  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const auto& t : terms) n += t.polygon.size();
    return n;
  }
  friend PolyShape operator+(PolyShape a, const PolyShape& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    return a;
  }
};

struct PointMass {
  Point2 point;
  std::int64_t weight = 1;
};

/// h = sum of w_i * indicator({x_i}).
class PointMassShape {
 public:
  PointMassShape() = default;
  explicit PointMassShape(std::vector<PointMass> masses) : masses_(std::move(masses)) {
    for (std::size_t i = 0; i < masses_.size(); ++i)
      for (std::size_t j = i + 1; j < masses_.size(); ++j)
        if (masses_[i].point == masses_[j].point) throw StructuralError("point masses must be distinct");
  }
  const std::vector<PointMass>& masses() const { return masses_; }
  bool empty() const { return masses_.empty(); }

 private:
  std::vector<PointMass> masses_;
};

using Shape = std::variant<PolyShape, PointMassShape>;

inline std::int64_t evaluate(const PolyShape& h, const Point2& x) {
  std::int64_t v = 0;
  for (const auto& t : h.terms)
    if (t.polygon.contains(x)) v += t.weight;
  return v;
}

inline std::int64_t evaluate(const PointMassShape& h, const Point2& x) {
  std::int64_t v = 0;
  for (const auto& m : h.masses())
    if (m.point == x) v += m.weight;
  return v;
}

/// Each closed simple polygon is compact and contractible, so the integral
/// is the sum of the weights.
inline std::int64_t shape_integral(const PolyShape& h) {
  std::int64_t s = 0;
  for (const auto& t : h.terms) s += t.weight;
  return s;
}

inline std::int64_t shape_integral(const PointMassShape& h) {
  std::int64_t s = 0;
  for (const auto& m : h.masses()) s += m.weight;
  return s;
}

struct BoundingBox {
  Rational xmin, ymin, xmax, ymax;

  BoundingBox inflated(const Rational& by) const { return {xmin - by, ymin - by, xmax + by, ymax + by}; }
  bool contains(const Point2& p) const { return xmin <= p.x && p.x <= xmax && ymin <= p.y && p.y <= ymax; }
};

inline std::optional<BoundingBox> bounding_box(const std::vector<Point2>& pts) {
  if (pts.empty()) return std::nullopt;
  BoundingBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    if (p.x < b.xmin) b.xmin = p.x;
    if (p.y < b.ymin) b.ymin = p.y;
    if (p.x > b.xmax) b.xmax = p.x;
    if (p.y > b.ymax) b.ymax = p.y;
  }
  return b;
}

inline std::vector<Point2> all_vertices(const PolyShape& h) {
  std::vector<Point2> out;
  for (const auto& t : h.terms) out.insert(out.end(), t.polygon.vertices().begin(), t.polygon.vertices().end());
  return out;
}

inline std::vector<Point2> all_vertices(const PointMassShape& h) {
  std::vector<Point2> out;
  for (const auto& m : h.masses()) out.push_back(m.point);
  return out;
}

/// Distinct vertices in lexicographic order.
inline std::vector<Point2> distinct_vertices(const PolyShape& h) {
  std::vector<Point2> v = all_vertices(h);
  std::sort(v.begin(), v.end(), Vec2Less{});
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// ---------------------------------------------------------------------------
// Triangulation

struct Triangulation {
  std::vector<std::array<std::size_t, 3>> triangles;  // counter-clockwise
  std::vector<std::array<std::size_t, 2>> diagonals;  // interior edges
};

/// Ear clipping without Steiner points. Ears whose diagonal would touch
/// another vertex are skipped, so collinear vertices never produce
/// T-junctions.
inline Triangulation triangulate(const Polygon& poly) {
  const auto& v = poly.vertices();
  std::vector<std::size_t> ring(v.size());
  for (std::size_t i = 0; i < ring.size(); ++i) ring[i] = i;
  Triangulation out;

  auto is_ear = [&](std::size_t k) {
    const std::size_t n = ring.size();
    const std::size_t ip = ring[(k + n - 1) % n], ic = ring[k], in = ring[(k + 1) % n];
    const Point2 &a = v[ip], &b = v[ic], &c = v[in];
    if (orientation(a, b, c) <= 0) return false;
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t iv = ring[m];
      if (iv == ip || iv == ic || iv == in) continue;
      const Point2& p = v[iv];
      if (orientation(a, b, p) >= 0 && orientation(b, c, p) >= 0 && orientation(c, a, p) >= 0) return false;
    }
    return true;
  };

  while (ring.size() > 3) {
    bool clipped = false;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      if (!is_ear(k)) continue;
      const std::size_t n = ring.size();
      const std::size_t ip = ring[(k + n - 1) % n], ic = ring[k], in = ring[(k + 1) % n];
      out.triangles.push_back({ip, ic, in});
      out.diagonals.push_back({ip, in});
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) throw StructuralError("triangulation failed: no ear found");
  }
  if (orientation(v[ring[0]], v[ring[1]], v[ring[2]]) <= 0)
    throw StructuralError("triangulation failed: degenerate final triangle");
  out.triangles.push_back({ring[0], ring[1], ring[2]});
  return out;
}

/// Cell complex of one triangulated closed polygon, all cells weighted w.
inline ConstructibleFn triangulated_complex(const Polygon& poly, std::int64_t w) {
  Triangulation tri = triangulate(poly);
  const std::size_t n = poly.size();
  const std::size_t cells = n + n + tri.diagonals.size() + tri.triangles.size();
  std::vector<Cell> cs;
  cs.reserve(cells);
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < n; ++i) cs.push_back({CellId{id++}, 0});
  for (std::size_t i = 0; i < n + tri.diagonals.size(); ++i) cs.push_back({CellId{id++}, 1});
  for (std::size_t i = 0; i < tri.triangles.size(); ++i) cs.push_back({CellId{id++}, 2});
  auto cx = std::make_shared<const FiniteCellComplex>(std::move(cs), 2);
  return ConstructibleFn(cx, std::vector<std::int64_t>(cells, w));
}

// ---------------------------------------------------------------------------
// Regions

/// Compact convex polygon given counter-clockwise; one vertex is a point,
/// two a segment.
class ConvexPolygon {
 public:
  ConvexPolygon() : vertices_{Point2{0, 0}} {}
  explicit ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw StructuralError("convex polygon needs a vertex");
    if (vertices_.size() == 2 && vertices_[0] == vertices_[1]) vertices_.pop_back();
    if (vertices_.size() >= 3) {
      if (sgn(twice_signed_area(vertices_)) < 0) std::reverse(vertices_.begin(), vertices_.end());
      const std::size_t n = vertices_.size();
      if (sgn(twice_signed_area(vertices_)) == 0) throw StructuralError("convex polygon has zero area");
      for (std::size_t i = 0; i < n; ++i)
        if (orientation(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) < 0)
          throw StructuralError("polygon is not convex");
      Polygon check(vertices_);  // simplicity
    }
  }
  const std::vector<Point2>& vertices() const { return vertices_; }

  ConvexPolygon translated(const Vec2& by) const {
    ConvexPolygon out = *this;
    for (auto& p : out.vertices_) p = p + by;
    return out;
  }

  bool contains(const Point2& p) const {
    const std::size_t n = vertices_.size();
    if (n == 1) return p == vertices_[0];
    if (n == 2) return on_segment(p, vertices_[0], vertices_[1]);
    for (std::size_t i = 0; i < n; ++i)
      if (orientation(vertices_[i], vertices_[(i + 1) % n], p) < 0) return false;
    return true;
  }

 private:
  std::vector<Point2> vertices_;
};

/// Separating-axis test for two compact convex point sets given by their
/// vertices (1, 2 or more).
inline bool convex_sets_intersect(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  std::vector<Vec2> axes{Vec2{1, 0}, Vec2{0, 1}};
  auto add_axes = [&](const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    if (n < 2) return;
    for (std::size_t i = 0; i < (n == 2 ? 1 : n); ++i) {
      Vec2 e = poly[(i + 1) % n] - poly[i];
      axes.push_back(perp(e));
      if (n == 2) axes.push_back(e);
    }
  };
  add_axes(a);
  add_axes(b);
  for (const Vec2& ax : axes) {
    if (is_zero(ax)) continue;
    Rational amin = dot(ax, a[0]), amax = amin;
    for (const auto& p : a) {
      Rational d = dot(ax, p);
      if (d < amin) amin = d;
      if (d > amax) amax = d;
    }
    Rational bmin = dot(ax, b[0]), bmax = bmin;
    for (const auto& p : b) {
      Rational d = dot(ax, p);
      if (d < bmin) bmin = d;
      if (d > bmax) bmax = d;
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

/// Closed double cone apex + (gamma U -gamma), gamma spanned by two rays
/// with opening angle strictly between 0 and pi.
class DoubleCone {
 public:
  DoubleCone(Point2 apex, Vec2 r1, Vec2 r2) : apex_(std::move(apex)), r1_(std::move(r1)), r2_(std::move(r2)) {
    const int s = sgn(cross(r1_, r2_));
    if (s == 0) throw StructuralError("cone generators must span an opening strictly between 0 and pi");
    if (s < 0) std::swap(r1_, r2_);
  }

  const Point2& apex() const { return apex_; }
  const Vec2& r1() const { return r1_; }
  const Vec2& r2() const { return r2_; }

  /// Scaled cone coordinates of p - apex: same signs as (alpha, beta) in
  /// p - apex = alpha r1 + beta r2.
  std::pair<Rational, Rational> coords(const Point2& p) const {
    Vec2 q = p - apex_;
    return {cross(q, r2_), cross(r1_, q)};
  }

  bool contains(const Point2& p) const {
    auto [a, b] = coords(p);
    return sgn(a) * sgn(b) >= 0;
  }

  DoubleCone translated_to(const Point2& apex) const { return DoubleCone(apex, r1_, r2_); }

 private:
  Point2 apex_;
  Vec2 r1_;
  Vec2 r2_;
};

using Region = std::variant<ConvexPolygon, DoubleCone>;

inline bool region_contains(const Region& r, const Point2& p) {
  return std::visit([&](const auto& g) { return g.contains(p); }, r);
}

// ---------------------------------------------------------------------------
// Plane sweeps over segments, rays and lines

/// Collects straight pieces in the (x, y) plane and sweeps them on a
/// sheared frame u = x + s*y, w = y in which no piece is vertical.
class PlaneArrangement {
 public:
  void add_segment(const Point2& a, const Point2& b) { pieces_.push_back({a, b - a, Kind::Segment}); }
  void add_point(const Point2& p) { pieces_.push_back({p, Vec2{0, 0}, Kind::Segment}); }
  void add_ray(const Point2& p, const Vec2& dir) { pieces_.push_back({p, dir, Kind::Ray}); }
  void add_line(const Point2& p, const Vec2& dir) { pieces_.push_back({p, dir, Kind::Line}); }

  std::size_t size() const { return pieces_.size(); }

  /// Shear parameter used for the sweep frame.
  Rational shear() const {
    std::vector<Rational> forbidden;
    for (const auto& pc : pieces_)
      if (sgn(pc.dir.y) != 0) forbidden.push_back(-pc.dir.x / pc.dir.y);
    for (long k = 0;; ++k) {
      Rational s = make_rational((k % 2 == 0) ? k / 2 : -(k / 2 + 1), 7 + k);
      if (k == 0) s = 0;
      if (std::find(forbidden.begin(), forbidden.end(), s) == forbidden.end()) return s;
    }
  }

  LineBase::Curve to_curve(std::size_t i, const Rational& s) const {
    const Piece& pc = pieces_[i];
    const Rational pu = pc.p.x + s * pc.p.y;
    const Rational pw = pc.p.y;
    const Rational du = pc.dir.x + s * pc.dir.y;
    const Rational dw = pc.dir.y;
    LineBase::Curve c;
    if (sgn(du) == 0) {
      if (!is_zero(pc.dir)) throw InternalConsistencyError("vertical piece after shear");
      c = LineBase::Curve{0, pw, pu, pu};
      return c;
    }
    c.slope = dw / du;
    c.intercept = pw - c.slope * pu;
    if (pc.kind == Kind::Segment) {
      Rational qu = pu + du;
      c.lo = std::min(pu, qu);
      c.hi = std::max(pu, qu);
    } else if (pc.kind == Kind::Ray) {
      if (sgn(du) > 0)
        c.lo = pu;
      else
        c.hi = pu;
    }
    return c;
  }

  /// Integrates f(point, view) over the arrangement of the collected pieces.
  template <class F>
  SweepResult integrate(F&& f, const SupportCertificate& cert = {}, const SweepOptions& options = {}) const {
    const Rational s = shear();
    CurveFamily<LineBase> fam;
    fam.curves.reserve(pieces_.size());
    for (std::size_t i = 0; i < pieces_.size(); ++i) fam.curves.push_back(to_curve(i, s));
    LineBase base;
    Point2 p;
    return sweep_euler_integral(
        base, fam,
        [&](const CellView<LineBase>& view) -> std::int64_t {
          p.y = view.ordinate();
          p.x = view.base() - s * p.y;
          return f(static_cast<const Point2&>(p), view);
        },
        cert, options);
  }

 private:
  enum class Kind { Segment, Ray, Line };
  struct Piece {
    Point2 p;
    Vec2 dir;
    Kind kind;
  };
  std::vector<Piece> pieces_;
};

inline void add_edges(PlaneArrangement& arr, const PolyShape& h) {
  for (const auto& t : h.terms) {
    const auto& v = t.polygon.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) arr.add_segment(v[i], t.polygon.next(i));
  }
}

inline void add_region(PlaneArrangement& arr, const Region& region) {
  if (const auto* c = std::get_if<ConvexPolygon>(&region)) {
    const auto& v = c->vertices();
    if (v.size() == 1) {
      arr.add_point(v[0]);
    } else if (v.size() == 2) {
      arr.add_segment(v[0], v[1]);
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) arr.add_segment(v[i], v[(i + 1) % v.size()]);
    }
  } else {
    const auto& d = std::get<DoubleCone>(region);
    arr.add_line(d.apex(), d.r1());
    arr.add_line(d.apex(), d.r2());
  }
}

/// Integral of h over the closed half-plane {x : x . dir <= t}, by a plane
/// sweep over the polygon edges and the boundary line.
inline std::int64_t halfplane_slice(const PolyShape& h, const Vec2& dir, const Rational& t,
                                    const SweepOptions& options = {}) {
  if (is_zero(dir)) throw StructuralError("zero direction");
  PlaneArrangement arr;
  add_edges(arr, h);
  const Point2 foot = (t / dot(dir, dir)) * dir;
  arr.add_line(foot, perp(dir));
  return arr
      .integrate(
          [&](const Point2& p, const CellView<LineBase>&) -> std::int64_t {
            return dot(p, dir) <= t ? evaluate(h, p) : 0;
          },
          {}, options)
      .integral;
}

/// Integral of h over a closed region (translated convex polygon or closed
/// double cone), by a plane sweep.
inline std::int64_t region_slice(const PolyShape& h, const Region& region, const SweepOptions& options = {}) {
  PlaneArrangement arr;
  add_edges(arr, h);
  add_region(arr, region);
  return arr
      .integrate(
          [&](const Point2& p, const CellView<LineBase>&) -> std::int64_t {
            return region_contains(region, p) ? evaluate(h, p) : 0;
          },
          {}, options)
      .integral;
}

/// Integral of h over the PL function level set: the line {x . dir = t}.
inline std::int64_t line_slice(const PolyShape& h, const Vec2& dir, const Rational& t,
                               const SweepOptions& options = {}) {
  if (is_zero(dir)) throw StructuralError("zero direction");
  PlaneArrangement arr;
  add_edges(arr, h);
  const Point2 foot = (t / dot(dir, dir)) * dir;
  arr.add_line(foot, perp(dir));
  return arr
      .integrate(
          [&](const Point2& p, const CellView<LineBase>&) -> std::int64_t {
            return dot(p, dir) == t ? evaluate(h, p) : 0;
          },
          {}, options)
      .integral;
}

}  // namespace eulercalc
