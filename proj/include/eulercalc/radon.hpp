#pragma once

// Euler-Radon transforms on R^2, kernel-pair verification, composite
// transforms and exact inversion.
//
// Conventions for a kernel K on X x Y and its dual K' on Y x X:
//   (R_K h)(y)          = integral over X of h(x) K(x, y) dchi(x)
//   kernel_chi_pair     = integral over Y of K(x, y) K'(y, x') dchi(y)
//   composite_eval(x)   = integral over Y of (R_K h)(y) K'(y, x) dchi(y)
// When the kernel-pair integral equals mu on the diagonal and lambda off
// it, composite = (mu - lambda) h + lambda * (integral of h), which is
// solved for h(x).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "eulercalc/errors.hpp"
#include "eulercalc/rational.hpp"
#include "eulercalc/shapes2d.hpp"
#include "eulercalc/simplicial.hpp"
#include "eulercalc/sweep.hpp"

namespace eulercalc {

enum class KernelKind { Sublevel, Superlevel, Hyperplane, DiscLevel, DiscSublevel, DiscSuperlevel, Cone, Blur };

inline std::string kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::Sublevel: return "sublevel";
    case KernelKind::Superlevel: return "superlevel";
    case KernelKind::Hyperplane: return "hyperplane";
    case KernelKind::DiscLevel: return "disc-level";
    case KernelKind::DiscSublevel: return "disc-sublevel";
    case KernelKind::DiscSuperlevel: return "disc-superlevel";
    case KernelKind::Cone: return "cone";
    case KernelKind::Blur: return "blur";
  }
  return "unknown";
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  for (KernelKind k : {KernelKind::Sublevel, KernelKind::Superlevel, KernelKind::Hyperplane, KernelKind::DiscLevel,
                       KernelKind::DiscSublevel, KernelKind::DiscSuperlevel, KernelKind::Cone, KernelKind::Blur}) {
    std::string name = kernel_name(k);
    std::string alt = name;
    for (auto& c : alt)
      if (c == '-') c = '_';
    if (s == name || s == alt) return k;
  }
  throw ParseError("unknown kernel '" + s + "'");
}

/// Y = S^1 x R, sampled as (xi, t) with xi up to positive scaling.
inline bool is_cylinder_kind(KernelKind k) {
  return k == KernelKind::Sublevel || k == KernelKind::Superlevel || k == KernelKind::Hyperplane;
}
/// X = closed disc of radius R, Y = boundary circle x [0, inf).
inline bool is_disc_kind(KernelKind k) {
  return k == KernelKind::DiscLevel || k == KernelKind::DiscSublevel || k == KernelKind::DiscSuperlevel;
}
/// Y = R^2.
inline bool is_plane_kind(KernelKind k) { return k == KernelKind::Cone || k == KernelKind::Blur; }

struct KernelSpec {
  KernelKind kind = KernelKind::Sublevel;
  /// Generators of the closed cone gamma (CONE).
  Vec2 cone_r1{1, 0};
  Vec2 cone_r2{0, 1};
  /// Filter C (BLUR).
  ConvexPolygon blur{};
  /// Radius of the disc domain (DISC_*).
  Rational disc_radius{1};

  void validate() const {
    if (kind == KernelKind::Cone) DoubleCone(Point2{0, 0}, cone_r1, cone_r2);
    if (is_disc_kind(kind) && sgn(disc_radius) <= 0) throw StructuralError("disc radius must be positive");
  }

  DoubleCone cone_at(const Point2& apex) const { return DoubleCone(apex, cone_r1, cone_r2); }
};

struct KernelPair {
  KernelSpec forward;
  KernelSpec dual;
  std::int64_t mu = 0;
  std::int64_t lambda = 0;
};

/// The shipped pair for a forward kernel, with its declared constants.
inline KernelPair standard_pair(const KernelSpec& forward) {
  forward.validate();
  KernelPair p{forward, forward, 0, 0};
  switch (forward.kind) {
    case KernelKind::Sublevel:
      p.dual.kind = KernelKind::Superlevel;
      p.mu = 0;
      p.lambda = 1;
      break;
    case KernelKind::Superlevel:
      p.dual.kind = KernelKind::Sublevel;
      p.mu = 0;
      p.lambda = 1;
      break;
    case KernelKind::Hyperplane:
      p.mu = 0;
      p.lambda = 1;
      break;
    case KernelKind::DiscLevel:
      p.mu = 0;
      p.lambda = 2;
      break;
    case KernelKind::DiscSublevel:
      // The off-diagonal set {d(x) <= t <= d(x')} is a compact contractible
      // region over a closed arc, so lambda is 1.
      p.dual.kind = KernelKind::DiscSuperlevel;
      p.mu = 0;
      p.lambda = 1;
      break;
    case KernelKind::DiscSuperlevel:
      p.dual.kind = KernelKind::DiscSublevel;
      p.mu = 0;
      p.lambda = 1;
      break;
    case KernelKind::Cone:
      p.mu = -1;
      p.lambda = 0;
      break;
    case KernelKind::Blur:
      throw UnsupportedCombination("blur kernel has no dual kernel in this toolkit");
  }
  return p;
}

inline KernelPair standard_pair(KernelKind kind) { return standard_pair(KernelSpec{kind}); }

// ---------------------------------------------------------------------------
// Points of Y

struct CylinderPoint {
  Vec2 dir;  // nonzero, any positive scale
  Rational t;
};

struct DiscPoint {
  double theta = 0;
  double t = 0;
};

using YPoint = std::variant<CylinderPoint, Point2, DiscPoint>;

/// Rational direction carrying the exact binary values of (cos, sin).
inline Vec2 direction_from_angle(double theta) {
  return Vec2{rational_from_double(std::cos(theta)), rational_from_double(std::sin(theta))};
}

/// Exact unit direction ((1 - s^2), 2 s) / (1 + s^2) for s = tan(theta / 2).
inline Vec2 direction_from_tan_half(const Rational& s) {
  Rational den = 1 + s * s;
  return Vec2{Rational((1 - s * s) / den), Rational(2 * s / den)};
}

struct TransformOptions {
  SweepOptions sweep{};
};

namespace detail {

inline const CylinderPoint& as_cylinder(const YPoint& y) {
  if (const auto* p = std::get_if<CylinderPoint>(&y)) return *p;
  throw StructuralError("kernel expects a point (direction, t) of the cylinder");
}
inline const Point2& as_plane(const YPoint& y) {
  if (const auto* p = std::get_if<Point2>(&y)) return *p;
  throw StructuralError("kernel expects a point of the plane");
}
inline const DiscPoint& as_disc(const YPoint& y) {
  if (const auto* p = std::get_if<DiscPoint>(&y)) return *p;
  throw StructuralError("kernel expects a point (theta, t) of the disc boundary cylinder");
}

inline double disc_distance(const KernelSpec& k, const Point2& x, double theta) {
  const double r = to_double(k.disc_radius);
  return std::hypot(to_double(x.x) - r * std::cos(theta), to_double(x.y) - r * std::sin(theta));
}

/// Squared distance to R(cos, sin) as a sinusoid: |x|^2 + R^2 - 2R x.(cos, sin).
inline CircleBase::Curve disc_curve(const KernelSpec& k, const Point2& x) {
  const double r = to_double(k.disc_radius);
  const double px = to_double(x.x), py = to_double(x.y);
  return CircleBase::Curve{px * px + py * py + r * r, -2 * r * px, -2 * r * py};
}

inline void require_in_disc(const KernelSpec& k, const Point2& x) {
  if (dot(x, x) > k.disc_radius * k.disc_radius) throw StructuralError("point lies outside the disc domain");
}

}  // namespace detail

/// K(x, y) as an indicator. The dual kernel K'(y, x) uses the same call with
/// the dual spec.
inline std::int64_t kernel_value(const KernelSpec& k, const Point2& x, const YPoint& y,
                                 double tolerance = kDefaultTolerance) {
  switch (k.kind) {
    case KernelKind::Sublevel: {
      const auto& c = detail::as_cylinder(y);
      return dot(x, c.dir) <= c.t;
    }
    case KernelKind::Superlevel: {
      const auto& c = detail::as_cylinder(y);
      return dot(x, c.dir) >= c.t;
    }
    case KernelKind::Hyperplane: {
      const auto& c = detail::as_cylinder(y);
      return dot(x, c.dir) == c.t;
    }
    case KernelKind::Cone:
      return k.cone_at(detail::as_plane(y)).contains(x);
    case KernelKind::Blur:
      return k.blur.translated(detail::as_plane(y)).contains(x);
    case KernelKind::DiscLevel:
    case KernelKind::DiscSublevel:
    case KernelKind::DiscSuperlevel: {
      const auto& d = detail::as_disc(y);
      if (d.t < -tolerance) return 0;
      const double dist = detail::disc_distance(k, x, d.theta);
      const double scale = std::max(1.0, std::abs(d.t));
      const bool eq = std::abs(dist - d.t) <= tolerance * scale;
      if (k.kind == KernelKind::DiscLevel) return eq;
      if (k.kind == KernelKind::DiscSublevel) return eq || dist < d.t;
      return eq || dist > d.t;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Forward transform

/// (R_K h)(y) by plane sweeps over h's edges and the kernel fibre.
inline std::int64_t forward_eval(const KernelSpec& k, const PolyShape& h, const YPoint& y,
                                 const TransformOptions& opt = {}) {
  switch (k.kind) {
    case KernelKind::Sublevel: {
      const auto& c = detail::as_cylinder(y);
      return halfplane_slice(h, c.dir, c.t, opt.sweep);
    }
    case KernelKind::Superlevel: {
      const auto& c = detail::as_cylinder(y);
      return halfplane_slice(h, -c.dir, -c.t, opt.sweep);
    }
    case KernelKind::Hyperplane: {
      // Closed half-planes on both sides overlap exactly in the line.
      const auto& c = detail::as_cylinder(y);
      return halfplane_slice(h, c.dir, c.t, opt.sweep) + halfplane_slice(h, -c.dir, -c.t, opt.sweep) -
             shape_integral(h);
    }
    case KernelKind::Cone:
      return region_slice(h, k.cone_at(detail::as_plane(y)), opt.sweep);
    case KernelKind::Blur:
      return region_slice(h, k.blur.translated(detail::as_plane(y)), opt.sweep);
    default:
      throw UnsupportedCombination("disc kernels are only supported on point-mass shapes");
  }
}

inline std::int64_t forward_eval(const KernelSpec& k, const PointMassShape& h, const YPoint& y,
                                 const TransformOptions& opt = {}) {
  std::int64_t v = 0;
  for (const auto& m : h.masses()) {
    if (is_disc_kind(k.kind)) detail::require_in_disc(k, m.point);
    v += m.weight * kernel_value(k, m.point, y, opt.sweep.tolerance);
  }
  return v;
}

inline std::int64_t forward_eval(const KernelSpec& k, const Shape& h, const YPoint& y,
                                 const TransformOptions& opt = {}) {
  return std::visit([&](const auto& s) { return forward_eval(k, s, y, opt); }, h);
}

/// Precompiled forward transform of a PolyShape: same values as
/// forward_eval, through TriangulatedShape incidence counts.
class ForwardOracle {
 public:
  ForwardOracle(KernelSpec k, const PolyShape& h) : kernel_(std::move(k)), shape_(h) {
    if (is_disc_kind(kernel_.kind)) throw UnsupportedCombination("disc kernels are only supported on point-mass shapes");
  }

  std::int64_t operator()(const YPoint& y) const {
    switch (kernel_.kind) {
      case KernelKind::Sublevel: {
        const auto& c = detail::as_cylinder(y);
        return shape_.halfplane(c.dir, c.t, true);
      }
      case KernelKind::Superlevel: {
        const auto& c = detail::as_cylinder(y);
        return shape_.halfplane(c.dir, c.t, false);
      }
      case KernelKind::Hyperplane: {
        const auto& c = detail::as_cylinder(y);
        return shape_.line(c.dir, c.t);
      }
      case KernelKind::Cone:
        return shape_.double_cone(kernel_.cone_at(detail::as_plane(y)));
      case KernelKind::Blur:
        return shape_.convex(kernel_.blur.translated(detail::as_plane(y)).vertices());
      default:
        throw UnsupportedCombination("disc kernels are only supported on point-mass shapes");
    }
  }

  const TriangulatedShape& shape() const { return shape_; }

 private:
  KernelSpec kernel_;
  TriangulatedShape shape_;
};

// ---------------------------------------------------------------------------
// Kernel-pair integral

namespace detail {

inline void check_standard(const KernelPair& pair) {
  KernelPair expect = standard_pair(pair.forward);
  if (expect.dual.kind != pair.dual.kind) throw StructuralError("unsupported kernel pairing");
}

inline SupportCertificate zero_ends() { return SupportCertificate{0, 0, {}, {}}; }

/// Halves a double-cover integral, requiring exact parity.
inline std::int64_t halve(std::int64_t v) {
  if (v % 2 != 0) throw InternalConsistencyError("odd integral on the double cover of the line space");
  return v / 2;
}

}  // namespace detail

/// Integral over Y of K(x, y) K'(y, x') for a shipped pair.
inline std::int64_t kernel_chi_pair(const KernelPair& pair, const Point2& x, const Point2& xp,
                                    const TransformOptions& opt = {}) {
  detail::check_standard(pair);
  const KernelSpec& k = pair.forward;
  const KernelSpec& kd = pair.dual;

  if (is_cylinder_kind(k.kind)) {
    CurveFamily<DirectionBase> fam;
    fam.curves = {{x}, {xp}};
    CylinderPoint y;
    auto r = sweep_euler_integral(
        DirectionBase{}, fam,
        [&](const CellView<DirectionBase>& v) -> std::int64_t {
          y.dir = v.base();
          y.t = v.ordinate();
          return kernel_value(k, x, y) * kernel_value(kd, xp, y);
        },
        detail::zero_ends(), opt.sweep);
    return k.kind == KernelKind::Hyperplane ? detail::halve(r.integral) : r.integral;
  }

  if (is_disc_kind(k.kind)) {
    detail::require_in_disc(k, x);
    detail::require_in_disc(k, xp);
    CurveFamily<CircleBase> fam;
    fam.curves = {detail::disc_curve(k, x), detail::disc_curve(k, xp)};
    fam.floor = 0.0;
    CircleBase base;
    base.tolerance = opt.sweep.tolerance;
    // Ordinate is the squared distance; t -> t^2 is a homeomorphism of
    // [0, inf) so the Euler integral is unchanged.
    auto indicator = [](KernelKind kind, const CellView<CircleBase>& v, std::size_t curve) -> std::int64_t {
      switch (kind) {
        case KernelKind::DiscLevel: return v.relation(curve) == Side::On;
        case KernelKind::DiscSublevel: return v.at_or_above(curve);
        default: return v.at_or_below(curve);
      }
    };
    auto r = sweep_euler_integral(
        base, fam,
        [&](const CellView<CircleBase>& v) -> std::int64_t { return indicator(k.kind, v, 0) * indicator(kd.kind, v, 1); },
        SupportCertificate{0, {}, {}, {}}, opt.sweep);
    return r.integral;
  }

  if (k.kind == KernelKind::Cone) {
    const DoubleCone cx = k.cone_at(x), cxp = k.cone_at(xp);
    PlaneArrangement arr;
    arr.add_line(x, cx.r1());
    arr.add_line(x, cx.r2());
    arr.add_line(xp, cx.r1());
    arr.add_line(xp, cx.r2());
    return arr
        .integrate([&](const Point2& y, const CellView<LineBase>&) -> std::int64_t {
          return cx.contains(y) && cxp.contains(y);
        }, {}, opt.sweep)
        .integral;
  }
  throw UnsupportedCombination("no kernel pair for " + kernel_name(k.kind));
}

// ---------------------------------------------------------------------------
// Composite transform

enum class ForwardRoute { Compiled, Sweep };

namespace detail {

template <class Forward>
std::int64_t composite_cylinder(const KernelPair& pair, const std::vector<Point2>& sites, const Point2& x,
                                Forward&& forward, const TransformOptions& opt) {
  CurveFamily<DirectionBase> fam;
  fam.curves.reserve(sites.size() + 1);
  for (const auto& v : sites) fam.curves.push_back({v});
  fam.curves.push_back({x});
  const std::size_t query = sites.size();
  const bool hyper = pair.forward.kind == KernelKind::Hyperplane;
  const KernelKind dual = pair.dual.kind;
  CylinderPoint y, yneg;

  auto r = sweep_euler_integral(
      DirectionBase{}, fam,
      [&](const CellView<DirectionBase>& v) -> std::int64_t {
        // K'(y, x) read off the query curve.
        bool k2 = false;
        switch (dual) {
          case KernelKind::Sublevel: k2 = v.at_or_above(query); break;    // x.d <= t
          case KernelKind::Superlevel: k2 = v.at_or_below(query); break;  // x.d >= t
          default: k2 = v.relation(query) == Side::On; break;
        }
        if (!k2) return 0;
        y.dir = v.base();
        y.t = v.ordinate();
        const std::int64_t val = forward(YPoint{y});
        if (hyper) {
          yneg.dir = -y.dir;
          yneg.t = -y.t;
          if (forward(YPoint{yneg}) != val)
            throw InternalConsistencyError("line-space integrand is not even on the double cover");
        }
        return val;
      },
      zero_ends(), opt.sweep);
  return hyper ? halve(r.integral) : r.integral;
}

template <class Forward>
std::int64_t composite_cone(const KernelPair& pair, const std::vector<Point2>& sites,
                            const std::vector<std::pair<Point2, Point2>>& edges, const Point2& x, Forward&& forward,
                            const TransformOptions& opt) {
  const DoubleCone query = pair.forward.cone_at(x);
  PlaneArrangement arr;
  for (const auto& v : sites) {
    arr.add_line(v, query.r1());
    arr.add_line(v, query.r2());
  }
  for (const auto& [a, b] : edges) arr.add_segment(a, b);
  arr.add_line(x, query.r1());
  arr.add_line(x, query.r2());
  return arr
      .integrate(
          [&](const Point2& y, const CellView<LineBase>&) -> std::int64_t {
            if (!query.contains(y)) return 0;  // K'(y, x) = [x - y in D] = [y in x + D]
            return forward(YPoint{y});
          },
          {}, opt.sweep)
      .integral;
}

inline std::vector<std::pair<Point2, Point2>> edges_of(const PolyShape& h) {
  std::vector<std::pair<Point2, Point2>> e;
  for (const auto& t : h.terms)
    for (std::size_t i = 0; i < t.polygon.size(); ++i) e.emplace_back(t.polygon[i], t.polygon.next(i));
  return e;
}

}  // namespace detail

/// (R_K' R_K h)(x), evaluated lazily by a sweep over the curves induced by
/// h's vertices and the query point.
inline std::int64_t composite_eval(const KernelPair& pair, const PolyShape& h, const Point2& x,
                                   const TransformOptions& opt = {}, ForwardRoute route = ForwardRoute::Compiled) {
  detail::check_standard(pair);
  const KernelKind kind = pair.forward.kind;
  if (is_disc_kind(kind)) throw UnsupportedCombination("disc kernels are only supported on point-mass shapes");

  std::optional<ForwardOracle> compiled;
  if (route == ForwardRoute::Compiled) compiled.emplace(pair.forward, h);
  auto forward = [&](const YPoint& y) -> std::int64_t {
    return compiled ? (*compiled)(y) : forward_eval(pair.forward, h, y, opt);
  };

  const std::vector<Point2> sites = distinct_vertices(h);
  if (is_cylinder_kind(kind)) return detail::composite_cylinder(pair, sites, x, forward, opt);
  if (kind == KernelKind::Cone) return detail::composite_cone(pair, sites, detail::edges_of(h), x, forward, opt);
  throw UnsupportedCombination("no kernel pair for " + kernel_name(kind));
}

inline std::int64_t composite_eval(const KernelPair& pair, const PointMassShape& h, const Point2& x,
                                   const TransformOptions& opt = {}, ForwardRoute = ForwardRoute::Compiled) {
  detail::check_standard(pair);
  const KernelKind kind = pair.forward.kind;
  std::vector<Point2> sites = all_vertices(h);
  auto forward = [&](const YPoint& y) { return forward_eval(pair.forward, h, y, opt); };

  if (is_cylinder_kind(kind)) return detail::composite_cylinder(pair, sites, x, forward, opt);
  if (kind == KernelKind::Cone) return detail::composite_cone(pair, sites, {}, x, forward, opt);
  if (is_disc_kind(kind)) {
    const KernelSpec& k = pair.forward;
    detail::require_in_disc(k, x);
    CurveFamily<CircleBase> fam;
    for (const auto& m : h.masses()) {
      detail::require_in_disc(k, m.point);
      fam.curves.push_back(detail::disc_curve(k, m.point));
    }
    fam.curves.push_back(detail::disc_curve(k, x));
    fam.floor = 0.0;
    const std::size_t query = h.masses().size();
    CircleBase base;
    base.tolerance = opt.sweep.tolerance;
    auto indicator = [](KernelKind kk, const CellView<CircleBase>& v, std::size_t curve) -> std::int64_t {
      switch (kk) {
        case KernelKind::DiscLevel: return v.relation(curve) == Side::On;
        case KernelKind::DiscSublevel: return v.at_or_above(curve);
        default: return v.at_or_below(curve);
      }
    };
    auto r = sweep_euler_integral(
        base, fam,
        [&](const CellView<CircleBase>& v) -> std::int64_t {
          if (!indicator(pair.dual.kind, v, query)) return 0;
          std::int64_t s = 0;
          for (std::size_t i = 0; i < query; ++i) s += h.masses()[i].weight * indicator(k.kind, v, i);
          return s;
        },
        SupportCertificate{0, {}, {}, {}}, opt.sweep);
    return r.integral;
  }
  throw UnsupportedCombination("no kernel pair for " + kernel_name(kind));
}

inline std::int64_t composite_eval(const KernelPair& pair, const Shape& h, const Point2& x,
                                   const TransformOptions& opt = {}, ForwardRoute route = ForwardRoute::Compiled) {
  return std::visit([&](const auto& s) { return composite_eval(pair, s, x, opt, route); }, h);
}

// ---------------------------------------------------------------------------
// Inversion

inline std::optional<BoundingBox> support_box(const PolyShape& h) { return bounding_box(all_vertices(h)); }
inline std::optional<BoundingBox> support_box(const PointMassShape& h) { return bounding_box(all_vertices(h)); }
inline std::optional<BoundingBox> support_box(const Shape& h) {
  return std::visit([](const auto& s) { return support_box(s); }, h);
}

/// Integral of h read from transform data only: a plateau of the forward
/// transform, or the composite transform far from the support.
template <class S>
std::int64_t recover_integral(const KernelPair& pair, const S& h, const BoundingBox& support,
                              const TransformOptions& opt = {}) {
  const KernelSpec& k = pair.forward;
  switch (k.kind) {
    case KernelKind::Sublevel:
      return forward_eval(k, h, CylinderPoint{Vec2{1, 0}, support.xmax + 1}, opt);
    case KernelKind::Superlevel:
      return forward_eval(k, h, CylinderPoint{Vec2{1, 0}, support.xmin - 1}, opt);
    case KernelKind::Hyperplane: {
      const Point2 far{support.xmax + 1, support.ymax + 1};
      const std::int64_t v = composite_eval(pair, h, far, opt);
      if (v % pair.lambda != 0) throw ExactDivisionError("far-field composite not divisible by lambda");
      return v / pair.lambda;
    }
    case KernelKind::DiscSublevel:
      return forward_eval(k, h, DiscPoint{0.0, 2 * to_double(k.disc_radius) + 1}, opt);
    case KernelKind::DiscSuperlevel:
      return forward_eval(k, h, DiscPoint{0.0, 0.0}, opt);
    case KernelKind::DiscLevel: {
      // Any disc point off the support reads lambda * c.
      const Rational r = k.disc_radius;
      (void)support;
      for (int i = 1;; ++i) {
        const Point2 probe{make_rational(0), Rational(r * make_rational(i, i + 1))};
        if (evaluate(h, probe) != 0) continue;
        const std::int64_t v = composite_eval(pair, h, probe, opt);
        if (v % pair.lambda != 0) throw ExactDivisionError("off-support composite not divisible by lambda");
        return v / pair.lambda;
      }
    }
    default:
      throw UnsupportedCombination("integral recovery not defined for " + kernel_name(k.kind));
  }
}

/// Recovers h(x) = (composite(x) - lambda * c) / (mu - lambda).
template <class S>
std::int64_t invert_at(const KernelPair& pair, const S& h, const Point2& x, const BoundingBox& support,
                       const TransformOptions& opt = {}) {
  if (pair.mu == pair.lambda) throw NonInvertibleKernel("mu equals lambda: the composite forgets h");
  const std::int64_t composite = composite_eval(pair, h, x, opt);
  const std::int64_t c = pair.lambda == 0 ? 0 : recover_integral(pair, h, support, opt);
  const std::int64_t num = composite - pair.lambda * c;
  const std::int64_t den = pair.mu - pair.lambda;
  if (num % den != 0)
    throw ExactDivisionError("composite " + std::to_string(composite) + " - lambda*c " +
                             std::to_string(pair.lambda * c) + " is not divisible by mu - lambda = " +
                             std::to_string(den));
  return num / den;
}

// ---------------------------------------------------------------------------
// Batch reconstruction

struct GridSpec {
  BoundingBox window{make_rational(-1), make_rational(-1), make_rational(2), make_rational(2)};
  int nx = 9;
  int ny = 9;
  int extra_random = 0;
  std::uint64_t seed = 0;
  /// Adds polygon vertices and edge midpoints (or point masses) as queries.
  bool include_features = false;
};

struct ReconstructionReport {
  std::string kernel;
  std::vector<Point2> points;
  std::vector<std::int64_t> recovered;
  std::vector<std::int64_t> truth;
  std::size_t exact_matches = 0;
  std::vector<std::size_t> mismatches;  // indices into points

  bool all_exact() const { return exact_matches == points.size(); }
};

/// Uniform rational in [lo, hi] with denominator 1024 over the span.
/// Uses raw engine output so results are identical on every platform.
inline Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi) {
  const std::uint64_t k = rng() % 1025;
  return lo + (hi - lo) * make_rational(static_cast<long long>(k), 1024);
}

inline std::vector<Point2> feature_points(const PolyShape& h) {
  std::vector<Point2> out;
  for (const auto& t : h.terms)
    for (std::size_t i = 0; i < t.polygon.size(); ++i) {
      out.push_back(t.polygon[i]);
      out.push_back(make_rational(1, 2) * (t.polygon[i] + t.polygon.next(i)));
    }
  return out;
}
inline std::vector<Point2> feature_points(const PointMassShape& h) { return all_vertices(h); }

template <class S>
std::vector<Point2> query_points(const KernelPair& pair, const S& h, const GridSpec& g) {
  std::vector<Point2> pts;
  const BoundingBox& w = g.window;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Rational fx = g.nx > 1 ? make_rational(i, g.nx - 1) : make_rational(1, 2);
      Rational fy = g.ny > 1 ? make_rational(j, g.ny - 1) : make_rational(1, 2);
      pts.push_back(Point2{w.xmin + (w.xmax - w.xmin) * fx, w.ymin + (w.ymax - w.ymin) * fy});
    }
  if (g.include_features) {
    auto f = feature_points(h);
    pts.insert(pts.end(), f.begin(), f.end());
  }
  std::mt19937_64 rng(g.seed);
  for (int r = 0; r < g.extra_random; ++r) {
    Rational px = random_rational(rng, w.xmin, w.xmax);
    Rational py = random_rational(rng, w.ymin, w.ymax);
    pts.push_back(Point2{px, py});
  }
  if (is_disc_kind(pair.forward.kind)) {
    const Rational r2 = pair.forward.disc_radius * pair.forward.disc_radius;
    std::erase_if(pts, [&](const Point2& p) { return dot(p, p) > r2; });
  }
  return pts;
}

template <class S>
ReconstructionReport reconstruct_grid(const KernelPair& pair, const S& h, const GridSpec& g,
                                      const TransformOptions& opt = {}) {
  ReconstructionReport rep;
  rep.kernel = kernel_name(pair.forward.kind);
  rep.points = query_points(pair, h, g);
  const BoundingBox support = support_box(h).value_or(BoundingBox{0, 0, 0, 0});

  // c is shared by all queries.
  std::int64_t c = 0;
  if (pair.mu == pair.lambda) throw NonInvertibleKernel("mu equals lambda: the composite forgets h");
  if (pair.lambda != 0) c = recover_integral(pair, h, support, opt);

  for (const auto& x : rep.points) {
    const std::int64_t composite = composite_eval(pair, h, x, opt);
    const std::int64_t num = composite - pair.lambda * c;
    const std::int64_t den = pair.mu - pair.lambda;
    if (num % den != 0)
      throw ExactDivisionError("inexact division at (" + to_string(x.x) + ", " + to_string(x.y) +
                               "): composite " + std::to_string(composite) + ", lambda*c " +
                               std::to_string(pair.lambda * c) + ", mu - lambda " + std::to_string(den));
    const std::int64_t got = num / den;
    const std::int64_t want = evaluate(h, x);
    rep.recovered.push_back(got);
    rep.truth.push_back(want);
    if (got == want)
      ++rep.exact_matches;
    else
      rep.mismatches.push_back(rep.recovered.size() - 1);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Discretised transform export

struct CriticalCurve {
  Point2 site;
  /// (term index, weight) of every polygon or mass with a vertex at site.
  std::vector<std::pair<std::size_t, std::int64_t>> terms;
  std::string formula;
};

struct TransformProfile {
  KernelSpec kernel;
  std::vector<double> thetas;
  std::vector<double> ts;
  std::vector<std::vector<std::int64_t>> values;  // [direction][t]
  std::vector<CriticalCurve> critical_curves;
};

struct ProfileWindow {
  double lo = 0;
  double hi = 0;
};

namespace detail {

inline std::vector<CriticalCurve> critical_curves(const KernelSpec& k, const PolyShape& h) {
  std::vector<CriticalCurve> out;
  for (const auto& v : distinct_vertices(h)) {
    CriticalCurve c{v, {}, "t = " + to_string(v.x) + "*cos(theta) + " + to_string(v.y) + "*sin(theta)"};
    for (std::size_t i = 0; i < h.terms.size(); ++i)
      for (const auto& p : h.terms[i].polygon.vertices())
        if (p == v) c.terms.emplace_back(i, h.terms[i].weight);
    out.push_back(std::move(c));
  }
  (void)k;
  return out;
}

inline std::vector<CriticalCurve> critical_curves(const KernelSpec& k, const PointMassShape& h) {
  std::vector<CriticalCurve> out;
  for (std::size_t i = 0; i < h.masses().size(); ++i) {
    const auto& m = h.masses()[i];
    std::string f = is_disc_kind(k.kind)
                        ? "t = |(" + to_string(m.point.x) + ", " + to_string(m.point.y) + ") - " +
                              to_string(k.disc_radius) + "*(cos(theta), sin(theta))|"
                        : "t = " + to_string(m.point.x) + "*cos(theta) + " + to_string(m.point.y) + "*sin(theta)";
    out.push_back(CriticalCurve{m.point, {{i, m.weight}}, f});
  }
  return out;
}

}  // namespace detail

/// Default t-window: one unit beyond the extreme site projections (or
/// distances, for disc kernels) over the sampled directions.
template <class S>
ProfileWindow default_window(const KernelSpec& k, const S& h, int directions) {
  const auto sites = all_vertices(h);
  if (sites.empty()) return {-1.0, 1.0};
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < directions; ++i) {
    const double th = 2.0 * std::numbers::pi * i / directions;
    for (const auto& v : sites) {
      double p = is_disc_kind(k.kind) ? detail::disc_distance(k, v, th)
                                      : to_double(dot(v, direction_from_angle(th)));
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  lo -= 1;
  hi += 1;
  if (is_disc_kind(k.kind)) lo = std::max(lo, 0.0);
  return {lo, hi};
}

template <class S>
TransformProfile export_profile(const KernelSpec& k, const S& h, int directions, int t_samples,
                                std::optional<ProfileWindow> window = std::nullopt, const TransformOptions& opt = {}) {
  if (directions < 1 || t_samples < 1) throw StructuralError("sample counts must be at least 1");
  if (is_plane_kind(k.kind))
    throw UnsupportedCombination("profiles are sampled over (theta, t); " + kernel_name(k.kind) +
                                 " transforms live on the plane");
  constexpr bool is_poly = std::is_same_v<S, PolyShape>;
  if (is_poly && is_disc_kind(k.kind)) throw UnsupportedCombination("disc kernels are only supported on point-mass shapes");

  TransformProfile prof;
  prof.kernel = k;
  const ProfileWindow w = window.value_or(default_window(k, h, directions));
  for (int i = 0; i < directions; ++i) prof.thetas.push_back(2.0 * std::numbers::pi * i / directions);
  for (int j = 0; j < t_samples; ++j)
    prof.ts.push_back(t_samples == 1 ? w.lo : w.lo + (w.hi - w.lo) * j / (t_samples - 1));
  if (t_samples > 1) prof.ts.back() = w.hi;

  std::optional<ForwardOracle> compiled;
  if constexpr (is_poly) compiled.emplace(k, h);

  prof.values.assign(directions, std::vector<std::int64_t>(t_samples, 0));
  for (int i = 0; i < directions; ++i) {
    const Vec2 dir = direction_from_angle(prof.thetas[i]);
    for (int j = 0; j < t_samples; ++j) {
      if (is_disc_kind(k.kind)) {
        prof.values[i][j] = forward_eval(k, h, DiscPoint{prof.thetas[i], prof.ts[j]}, opt);
      } else {
        YPoint y = CylinderPoint{dir, rational_from_double(prof.ts[j])};
        if constexpr (is_poly)
          prof.values[i][j] = (*compiled)(y);
        else
          prof.values[i][j] = forward_eval(k, h, y, opt);
      }
    }
  }
  prof.critical_curves = detail::critical_curves(k, h);
  return prof;
}

}  // namespace eulercalc
