#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "eulercalc/errors.hpp"

namespace eulercalc {

using Rational = mpq_class;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw ParseError("zero denominator");
  Rational q{mpz_class{std::to_string(num)}, mpz_class{std::to_string(den)}};
  q.canonicalize();
  return q;
}

/// Every finite double is a dyadic rational; this conversion is exact.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw StructuralError("non-finite coordinate");
  return Rational{v};
}

/// Parses "p", "p/q" or a decimal literal such as "-1.25".
inline Rational parse_rational(std::string_view text) {
  std::string s{text};
  if (s.empty()) throw ParseError("empty rational literal");
  try {
    if (auto dot = s.find('.'); dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      std::size_t scale = s.size() - dot - 1;
      mpz_class num{digits};
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
      Rational q{num, den};
      q.canonicalize();
      return q;
    }
    Rational q{s};
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ParseError("bad rational literal '" + s + "'");
  }
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline int sign(const Rational& q) { return sgn(q); }

inline Rational abs_value(const Rational& q) { return abs(q); }

struct Vec2 {
  Rational x;
  Rational y;

  friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(const Rational& k, const Vec2& a) { return {k * a.x, k * a.y}; }
  friend std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << '(' << v.x << ", " << v.y << ')';
  }
};

using Point2 = Vec2;

inline Rational dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline Rational cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
/// Counter-clockwise quarter turn.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline bool is_zero(const Vec2& a) { return sgn(a.x) == 0 && sgn(a.y) == 0; }
inline Rational l1_norm(const Vec2& a) { return abs(a.x) + abs(a.y); }

/// Sign of the turn a -> b -> c.
inline int orientation(const Point2& a, const Point2& b, const Point2& c) {
  return sgn(cross(b - a, c - a));
}

/// True when p lies on the closed segment [a, b].
inline bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  if (orientation(a, b, p) != 0) return false;
  return sgn(dot(p - a, p - b)) <= 0;
}

struct Vec2Less {
  bool operator()(const Vec2& a, const Vec2& b) const {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  }
};

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace eulercalc
