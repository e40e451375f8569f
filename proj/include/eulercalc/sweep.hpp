#pragma once

// Critical-value sweep for Euler integrals of piecewise-constant integrands
// on the plane (LineBase) or on a cylinder (DirectionBase, CircleBase).
//
// The domain is cut at every critical base point (pairwise curve
// intersections and curve endpoints). Over each critical point the vertical
// line splits into points on curves and open intervals between them; over
// each open slab the region splits into open curve arcs and open regions
// between consecutive curves. Every such part is homeomorphic to R^d, so the
// integral is the sum of value * (-1)^d over parts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eulercalc/errors.hpp"
#include "eulercalc/rational.hpp"

namespace eulercalc {

/// Position of a sample point relative to a curve of the family.
enum class Side : std::int8_t { Below, On, Above, Absent };

inline constexpr double kDefaultTolerance = 1e-9;

struct SweepOptions {
  /// Sample every non-point part twice and require equal integrand values.
  bool audit = false;
  /// Comparison tolerance for floating-point bases.
  double tolerance = kDefaultTolerance;
};

/// Known integrand values on unbounded extreme parts. Declared values are
/// used instead of evaluating; in audit mode they are checked.
struct SupportCertificate {
  std::optional<std::int64_t> above;  // above every curve
  std::optional<std::int64_t> below;  // below every curve
  std::optional<std::int64_t> left;   // whole slab left of all critical values (plane only)
  std::optional<std::int64_t> right;  // whole slab right of all critical values (plane only)
};

struct SweepResult {
  std::int64_t integral = 0;
  std::size_t critical_points = 0;
  std::size_t parts = 0;
  std::size_t evaluations = 0;
};

// ---------------------------------------------------------------------------
// Bases

/// Plane swept along u, curves are affine graphs w = slope * u + intercept,
/// optionally restricted to a closed u-interval. Exact rational arithmetic.
struct LineBase {
  using Coord = Rational;
  using Value = Rational;
  static constexpr bool periodic = false;
  static constexpr bool exact = true;

  struct Curve {
    Rational slope;
    Rational intercept;
    std::optional<Rational> lo;
    std::optional<Rational> hi;
  };

  static Curve line(Rational slope, Rational intercept) { return Curve{std::move(slope), std::move(intercept), {}, {}}; }
  static Curve constant(const Value& v) { return line(0, v); }

  bool active(const Curve& c, const Coord& u) const { return (!c.lo || *c.lo <= u) && (!c.hi || u <= *c.hi); }
  Value value(const Curve& c, const Coord& u) const { return c.slope * u + c.intercept; }

  void intersections(const Curve& a, const Curve& b, std::vector<Coord>& out) const {
    if (a.slope == b.slope) return;  // parallel or coincident
    Rational u = (b.intercept - a.intercept) / (a.slope - b.slope);
    if (active(a, u) && active(b, u)) out.push_back(std::move(u));
  }

  void endpoints(const Curve& c, std::vector<Coord>& out) const {
    if (c.lo) out.push_back(*c.lo);
    if (c.hi) out.push_back(*c.hi);
  }

  bool less(const Coord& a, const Coord& b) const { return a < b; }
  bool same(const Coord& a, const Coord& b) const { return a == b; }
  int compare(const Value& a, const Value& b) const { return a < b ? -1 : (b < a ? 1 : 0); }
  bool near(const Value&, const Value&) const { return false; }
  bool near_coord(const Coord&, const Coord&) const { return false; }

  Coord between(const Coord& a, const Coord& b, int which) const {
    return which == 0 ? Coord((a + b) / 2) : Coord((a + 2 * b) / 3);
  }
  Coord before(const Coord& a, int which) const { return a - (which + 1); }
  Coord after(const Coord& a, int which) const { return a + (which + 1); }
  Coord anywhere(int which) const { return Coord(which); }

  Value mid(const Value& a, const Value& b, int which) const {
    return which == 0 ? Value((a + b) / 2) : Value((a + 2 * b) / 3);
  }
  Value magnitude(const Value& a) const { return abs(a); }
  Value offset(const Value& m, int sign, int which) const { return sign * (m + 1 + which); }
};

/// Cylinder S^1 x R parametrised by rational direction vectors d up to
/// positive scaling; a point (d, t) stands for (d/|d|, t/|d|). Curves are
/// linear forms t = a . d, which covers every curve t = v . xi(theta).
struct DirectionBase {
  using Coord = Vec2;
  using Value = Rational;
  static constexpr bool periodic = true;
  static constexpr bool exact = true;

  struct Curve {
    Vec2 a;
  };

  bool active(const Curve&, const Coord&) const { return true; }
  Value value(const Curve& c, const Coord& d) const { return dot(c.a, d); }

  void intersections(const Curve& p, const Curve& q, std::vector<Coord>& out) const {
    Vec2 diff = p.a - q.a;
    if (is_zero(diff)) return;
    Vec2 n = perp(diff);
    out.push_back(n);
    out.push_back(-n);
  }
  void endpoints(const Curve&, std::vector<Coord>&) const {}

  /// 0 for angles in [0, pi), 1 for [pi, 2 pi).
  static int half(const Vec2& d) { return (sgn(d.y) > 0 || (sgn(d.y) == 0 && sgn(d.x) > 0)) ? 0 : 1; }

  bool less(const Coord& a, const Coord& b) const {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    return sgn(cross(a, b)) > 0;
  }
  bool same(const Coord& a, const Coord& b) const { return half(a) == half(b) && sgn(cross(a, b)) == 0; }
  int compare(const Value& a, const Value& b) const { return a < b ? -1 : (b < a ? 1 : 0); }
  bool near(const Value&, const Value&) const { return false; }
  bool near_coord(const Coord&, const Coord&) const { return false; }

  /// A direction strictly inside the counter-clockwise arc from a to b.
  Coord between(const Coord& a, const Coord& b, int which) const {
    const int turn = sgn(cross(a, b));
    if (same(a, b)) {  // single critical direction: the arc is everything else
      Vec2 opp = -a;
      return which == 0 ? opp : Coord(opp + perp(a));
    }
    if (turn == 0) {  // antipodal: half-turn arc
      Vec2 q = perp(a);
      return which == 0 ? q : Coord(l1_norm(q) * a + 2 * l1_norm(a) * q);
    }
    const int k = which + 1;
    Vec2 inner = l1_norm(b) * a + Rational(k) * l1_norm(a) * b;
    return turn > 0 ? inner : Coord(-inner);
  }
  Coord before(const Coord&, int) const { throw InternalConsistencyError("no extreme slabs on a cylinder"); }
  Coord after(const Coord&, int) const { throw InternalConsistencyError("no extreme slabs on a cylinder"); }
  Coord anywhere(int) const { return Vec2{1, 0}; }

  Value mid(const Value& a, const Value& b, int which) const {
    return which == 0 ? Value((a + b) / 2) : Value((a + 2 * b) / 3);
  }
  Value magnitude(const Value& a) const { return abs(a); }
  Value offset(const Value& m, int sign, int which) const { return sign * (m + 1 + which); }
};

/// Cylinder S^1 x R with a floating-point angle. Curves are sinusoids
/// q(theta) = c + a cos(theta) + b sin(theta); intersections are solved in
/// closed form and compared with an absolute tolerance.
struct CircleBase {
  using Coord = double;
  using Value = double;
  static constexpr bool periodic = true;
  static constexpr bool exact = false;
  static constexpr double kTwoPi = 2.0 * std::numbers::pi;

  struct Curve {
    double c = 0;
    double a = 0;
    double b = 0;
  };

  double tolerance = kDefaultTolerance;

  static Curve constant(double v) { return Curve{v, 0, 0}; }

  bool active(const Curve&, const Coord&) const { return true; }
  Value value(const Curve& k, const Coord& th) const { return k.c + k.a * std::cos(th) + k.b * std::sin(th); }

  static double wrap(double th) {
    double r = std::fmod(th, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
  }

  void intersections(const Curve& p, const Curve& q, std::vector<Coord>& out) const {
    const double da = p.a - q.a, db = p.b - q.b, dc = q.c - p.c;
    if (!std::isfinite(da) || !std::isfinite(db) || !std::isfinite(dc))
      throw StructuralError("non-finite curve coefficients");
    const double r = std::hypot(da, db);
    if (r <= tolerance) {
      // Parallel sinusoids never cross; coincident ones are merged by the
      // ordinate dedup.
      return;
    }
    const double ratio = dc / r;
    if (std::abs(ratio) > 1.0 + tolerance) return;
    const double phase = std::atan2(db, da);
    const double spread = std::acos(std::clamp(ratio, -1.0, 1.0));
    if (!std::isfinite(phase) || !std::isfinite(spread)) throw StructuralError("non-finite intersection");
    if (spread <= std::sqrt(tolerance)) {
      out.push_back(wrap(phase));  // tangency
      return;
    }
    if (std::numbers::pi - spread <= std::sqrt(tolerance)) {
      out.push_back(wrap(phase + std::numbers::pi));
      return;
    }
    out.push_back(wrap(phase + spread));
    out.push_back(wrap(phase - spread));
  }
  void endpoints(const Curve&, std::vector<Coord>&) const {}

  bool less(const Coord& x, const Coord& y) const { return x < y; }
  bool same(const Coord& x, const Coord& y) const {
    double d = std::abs(x - y);
    return std::min(d, kTwoPi - d) <= tolerance;
  }
  bool near_coord(const Coord& x, const Coord& y) const {
    double d = std::abs(x - y);
    return std::min(d, kTwoPi - d) <= 10 * tolerance;
  }
  int compare(const Value& x, const Value& y) const {
    if (std::abs(x - y) <= tolerance * std::max(1.0, std::max(std::abs(x), std::abs(y)))) return 0;
    return x < y ? -1 : 1;
  }
  bool near(const Value& x, const Value& y) const {
    return std::abs(x - y) <= 10 * tolerance * std::max(1.0, std::max(std::abs(x), std::abs(y)));
  }

  Coord between(const Coord& x, const Coord& y, int which) const {
    double span = y - x;
    if (span <= 0) span += kTwoPi;
    return wrap(x + span * (which == 0 ? 0.5 : 1.0 / 3.0));
  }
  Coord before(const Coord&, int) const { throw InternalConsistencyError("no extreme slabs on a cylinder"); }
  Coord after(const Coord&, int) const { throw InternalConsistencyError("no extreme slabs on a cylinder"); }
  Coord anywhere(int) const { return 0.0; }

  Value mid(const Value& x, const Value& y, int which) const { return which == 0 ? (x + y) / 2 : (x + 2 * y) / 3; }
  Value magnitude(const Value& x) const { return std::abs(x); }
  Value offset(const Value& m, int sign, int which) const { return sign * (m + 1 + which); }
};

// ---------------------------------------------------------------------------
// Problem description

template <class Base>
struct CurveFamily {
  using Curve = typename Base::Curve;
  std::vector<Curve> curves;
  /// Lower bound on the ordinate: parts strictly below are not part of the
  /// domain. Implemented as an extra constant curve appended last.
  std::optional<typename Base::Value> floor;
};

/// A representative point of one arrangement part, handed to the integrand.
template <class Base>
class CellView {
 public:
  using Coord = typename Base::Coord;
  using Value = typename Base::Value;

  CellView(const Coord& base, const Value& ordinate, int dim, bool on_critical, const std::vector<int>& rank,
           int level, int gap)
      : base_(base), ordinate_(ordinate), dim_(dim), on_critical_(on_critical), rank_(rank), level_(level), gap_(gap) {}

  const Coord& base() const { return base_; }
  const Value& ordinate() const { return ordinate_; }
  int dim() const { return dim_; }
  bool on_critical_vertical() const { return on_critical_; }

  /// Where this sample sits relative to curve `i` of the family.
  Side relation(std::size_t i) const {
    const int r = rank_[i];
    if (r < 0) return Side::Absent;
    if (level_ >= 0) {
      if (r == level_) return Side::On;
      return r < level_ ? Side::Above : Side::Below;
    }
    return r < gap_ ? Side::Above : Side::Below;
  }

  /// Convenience: sample lies on or above curve i.
  bool at_or_above(std::size_t i) const {
    Side s = relation(i);
    return s == Side::On || s == Side::Above;
  }
  bool at_or_below(std::size_t i) const {
    Side s = relation(i);
    return s == Side::On || s == Side::Below;
  }

 private:
  const Coord& base_;
  const Value& ordinate_;
  int dim_;
  bool on_critical_;
  const std::vector<int>& rank_;
  int level_;  // >= 0 when the part lies on a level
  int gap_;    // gap index when the part lies between levels
};

namespace detail {

template <class Base>
struct Stack {
  std::vector<int> rank;                       // per curve, level index or -1
  std::vector<typename Base::Value> levels;    // distinct ordinates, ascending
  std::vector<std::size_t> order;              // scratch
  std::vector<typename Base::Value> values;    // scratch, per curve
  int floor_level = -1;
};

template <class Base>
void build_stack(const Base& base, const std::vector<typename Base::Curve>& curves,
                 const typename Base::Coord& at, std::optional<std::size_t> floor_index, Stack<Base>& s) {
  const std::size_t n = curves.size();
  s.rank.assign(n, -1);
  s.levels.clear();
  s.order.clear();
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!base.active(curves[i], at)) continue;
    s.values[i] = base.value(curves[i], at);
    s.order.push_back(i);
  }
  std::sort(s.order.begin(), s.order.end(),
            [&](std::size_t a, std::size_t b) { return base.compare(s.values[a], s.values[b]) < 0; });
  for (std::size_t k = 0; k < s.order.size(); ++k) {
    const std::size_t i = s.order[k];
    if (s.levels.empty() || base.compare(s.levels.back(), s.values[i]) != 0) {
      if constexpr (!Base::exact) {
        if (!s.levels.empty() && base.near(s.levels.back(), s.values[i]))
          throw GenericityError("two curve ordinates are nearly but not exactly equal");
      }
      s.levels.push_back(s.values[i]);
    }
    s.rank[i] = static_cast<int>(s.levels.size()) - 1;
  }
  s.floor_level = floor_index ? s.rank[*floor_index] : -1;
}

}  // namespace detail

/// Sorted, deduplicated critical base points of a family: pairwise
/// intersections plus curve endpoints. Cyclic order on periodic bases.
template <class Base>
std::vector<typename Base::Coord> critical_values(const Base& base, const std::vector<typename Base::Curve>& curves,
                                                  const SweepOptions& options = {}) {
  using Coord = typename Base::Coord;
  std::vector<Coord> pts;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    base.endpoints(curves[i], pts);
    for (std::size_t j = i + 1; j < curves.size(); ++j) base.intersections(curves[i], curves[j], pts);
  }
  std::sort(pts.begin(), pts.end(), [&](const Coord& a, const Coord& b) { return base.less(a, b); });
  std::vector<Coord> out;
  for (auto& p : pts) {
    if (!out.empty() && base.same(out.back(), p)) continue;
    if constexpr (!Base::exact) {
      if (!out.empty() && base.near_coord(out.back(), p))
        throw GenericityError("two critical values are nearly but not exactly equal");
    }
    out.push_back(std::move(p));
  }
  if constexpr (Base::periodic) {
    if (out.size() > 1 && base.same(out.front(), out.back())) out.pop_back();
  }
  (void)options;
  return out;
}

/// Euler integral of `integrand` over the arrangement of `family`.
///
/// `integrand` is called as `std::int64_t(const CellView<Base>&)` and must be
/// constant on every part of the arrangement.
template <class Base, class Integrand>
SweepResult sweep_euler_integral(const Base& base, const CurveFamily<Base>& family, Integrand&& integrand,
                                 const SupportCertificate& certificate = {}, const SweepOptions& options = {}) {
  using Coord = typename Base::Coord;
  using Value = typename Base::Value;

  std::vector<typename Base::Curve> curves = family.curves;
  std::optional<std::size_t> floor_index;
  if (family.floor) {
    if constexpr (requires { Base::constant(*family.floor); }) {
      floor_index = curves.size();
      curves.push_back(Base::constant(*family.floor));
    } else {
      throw StructuralError("this base does not support an ordinate floor");
    }
  }

  if constexpr (Base::periodic) {
    if (!certificate.above || *certificate.above != 0 ||
        (!floor_index && (!certificate.below || *certificate.below != 0)))
      throw StructuralError("cylinder sweeps require a zero certificate above and below all curves");
  }

  std::vector<Coord> crit = critical_values(base, curves, options);
  if constexpr (Base::periodic) {
    if (crit.empty()) crit.push_back(base.anywhere(0));
  }

  SweepResult result;
  result.critical_points = crit.size();
  detail::Stack<Base> stack, stack2;

  auto evaluate = [&](const CellView<Base>& view) -> std::int64_t {
    ++result.evaluations;
    return static_cast<std::int64_t>(integrand(view));
  };

  // Enumerates all parts above one base sample (a critical vertical when
  // dim_base == 0, an open slab when dim_base == 1).
  auto process_column = [&](const Coord& at, const Coord* at2, int dim_base, std::optional<std::int64_t> whole) {
    detail::build_stack(base, curves, at, floor_index, stack);
    const int m = static_cast<int>(stack.levels.size());
    const bool on_critical = dim_base == 0;
    if (at2) {
      detail::build_stack(base, curves, *at2, floor_index, stack2);
      if (stack2.rank != stack.rank)
        throw StructuralError("curves cross inside a slab: intersection oracle is incomplete");
    }

    Value maxabs{};
    for (const auto& v : stack.levels) {
      Value a = base.magnitude(v);
      if (base.compare(a, maxabs) > 0) maxabs = a;
    }
    Value maxabs2{};
    if (at2)
      for (const auto& v : stack2.levels) {
        Value a = base.magnitude(v);
        if (base.compare(a, maxabs2) > 0) maxabs2 = a;
      }

    auto contribute = [&](std::int64_t value, int dim) {
      ++result.parts;
      result.integral += (dim % 2 == 0) ? value : -value;
    };

    // Samples a part, spot-checking constancy when auditing.
    auto part = [&](int dim, int level, int gap, const Value& ord, const Value* ord_alt_same_base,
                    const Value* ord_at2, std::optional<std::int64_t> declared) {
      if (declared && !options.audit) {
        contribute(*declared, dim);
        return;
      }
      CellView<Base> view(at, ord, dim, on_critical, stack.rank, level, gap);
      const std::int64_t v = evaluate(view);
      if (options.audit) {
        auto check = [&](std::int64_t other, const char* what) {
          if (other != v)
            throw IntegrandNotConstructible(std::string("integrand not constant on a ") + std::to_string(dim) +
                                            "-dimensional part (" + what + ")");
        };
        if (ord_alt_same_base) {
          CellView<Base> v2(at, *ord_alt_same_base, dim, on_critical, stack.rank, level, gap);
          check(evaluate(v2), "second ordinate");
        }
        if (at2 && ord_at2) {
          CellView<Base> v3(*at2, *ord_at2, dim, on_critical, stack2.rank, level, gap);
          check(evaluate(v3), "second base sample");
        }
        if (declared && *declared != v) throw IntegrandNotConstructible("support certificate violated");
      }
      contribute(declared ? *declared : v, dim);
    };

    const int floor_level = stack.floor_level;
    if (m == 0) {
      Value o{}, o2 = o + 1;
      part(dim_base + 1, -1, 0, o, &o2, &o, whole);
      return;
    }

    for (int j = 0; j < m; ++j) {
      if (floor_level >= 0 && j < floor_level) continue;
      const Value* at2_level = at2 ? &stack2.levels[j] : nullptr;
      part(dim_base, j, -1, stack.levels[j], nullptr, at2_level, whole);
    }
    for (int g = 0; g <= m; ++g) {
      if (floor_level >= 0 && g <= floor_level) continue;
      std::optional<std::int64_t> declared = whole;
      Value o, o_alt, o2;
      if (g == 0) {
        if (!declared) declared = certificate.below;
        o = base.offset(maxabs, -1, 0);
        o_alt = base.offset(maxabs, -1, 1);
        if (at2) o2 = base.offset(maxabs2, -1, 0);
      } else if (g == m) {
        if (!declared) declared = certificate.above;
        o = base.offset(maxabs, 1, 0);
        o_alt = base.offset(maxabs, 1, 1);
        if (at2) o2 = base.offset(maxabs2, 1, 0);
      } else {
        o = base.mid(stack.levels[g - 1], stack.levels[g], 0);
        o_alt = base.mid(stack.levels[g - 1], stack.levels[g], 1);
        if (at2) o2 = base.mid(stack2.levels[g - 1], stack2.levels[g], 0);
      }
      part(dim_base + 1, -1, g, o, &o_alt, at2 ? &o2 : nullptr, declared);
    }
  };

  const std::size_t k = crit.size();
  for (std::size_t i = 0; i < k; ++i) process_column(crit[i], nullptr, 0, std::nullopt);

  if constexpr (Base::periodic) {
    for (std::size_t i = 0; i < k; ++i) {
      const Coord& a = crit[i];
      const Coord& b = crit[(i + 1) % k];
      Coord s = base.between(a, b, 0);
      Coord s2 = base.between(a, b, 1);
      process_column(s, options.audit ? &s2 : nullptr, 1, std::nullopt);
    }
  } else {
    if (k == 0) {
      Coord s = base.anywhere(0), s2 = base.anywhere(1);
      process_column(s, options.audit ? &s2 : nullptr, 1, std::nullopt);
    } else {
      Coord l = base.before(crit.front(), 0), l2 = base.before(crit.front(), 1);
      process_column(l, options.audit ? &l2 : nullptr, 1, certificate.left);
      for (std::size_t i = 0; i + 1 < k; ++i) {
        Coord s = base.between(crit[i], crit[i + 1], 0);
        Coord s2 = base.between(crit[i], crit[i + 1], 1);
        process_column(s, options.audit ? &s2 : nullptr, 1, std::nullopt);
      }
      Coord r = base.after(crit.back(), 0), r2 = base.after(crit.back(), 1);
      process_column(r, options.audit ? &r2 : nullptr, 1, certificate.right);
    }
  }
  return result;
}

}  // namespace eulercalc
