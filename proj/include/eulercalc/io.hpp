#pragma once

// Shape JSON, profile CSV and report JSON.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eulercalc/errors.hpp"
#include "eulercalc/euler_core.hpp"
#include "eulercalc/radon.hpp"
#include "eulercalc/rational.hpp"
#include "eulercalc/shapes2d.hpp"

namespace eulercalc::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Shortest text that reads back as the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw InternalConsistencyError("double formatting failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline Rational scalar(const json& j) {
  if (j.is_number_integer()) return make_rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  throw ParseError("coordinate must be an integer, a float or a \"p/q\" string");
}

inline std::int64_t integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

inline Point2 point(const json& j) {
  if (!j.is_array()) throw ParseError("point must be an array");
  if (j.size() == 2) return Point2{scalar(j[0]), scalar(j[1])};
  if (j.size() == 4) {
    const std::int64_t xd = integer(j[1], "denominator"), yd = integer(j[3], "denominator");
    if (xd == 0 || yd == 0) throw ParseError("zero denominator");
    return Point2{make_rational(integer(j[0], "numerator"), xd), make_rational(integer(j[2], "numerator"), yd)};
  }
  throw ParseError("point must be [x, y] or [xn, xd, yn, yd]");
}

inline bool fits_long(const Rational& q) { return q.get_num().fits_slong_p() && q.get_den().fits_slong_p(); }

inline json point_json(const Point2& p) {
  if (!fits_long(p.x) || !fits_long(p.y)) return json::array({to_string(p.x), to_string(p.y)});
  if (p.x.get_den() == 1 && p.y.get_den() == 1) return json::array({p.x.get_num().get_si(), p.y.get_num().get_si()});
  return json::array({p.x.get_num().get_si(), p.x.get_den().get_si(), p.y.get_num().get_si(), p.y.get_den().get_si()});
}

}  // namespace detail

inline Shape parse_shape(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("shape file must be a JSON object");
  const bool has_polys = j.contains("polygons"), has_points = j.contains("points");
  if (has_polys == has_points) throw ParseError("shape file needs exactly one of \"polygons\" or \"points\"");

  try {
    if (has_polys) {
      PolyShape h;
      if (!j["polygons"].is_array()) throw ParseError("\"polygons\" must be an array");
      for (const auto& p : j["polygons"]) {
        if (!p.is_object() || !p.contains("vertices")) throw ParseError("polygon needs \"vertices\"");
        std::vector<Point2> v;
        for (const auto& q : p["vertices"]) v.push_back(detail::point(q));
        const std::int64_t w = p.contains("weight") ? detail::integer(p["weight"], "weight") : 1;
        h.add(Polygon(std::move(v)), w);
      }
      return h;
    }
    if (!j["points"].is_array()) throw ParseError("\"points\" must be an array");
    std::vector<PointMass> m;
    for (const auto& p : j["points"]) {
      if (!p.is_object() || !p.contains("point")) throw ParseError("point mass needs \"point\"");
      const std::int64_t w = p.contains("weight") ? detail::integer(p["weight"], "weight") : 1;
      m.push_back(PointMass{detail::point(p["point"]), w});
    }
    return PointMassShape(std::move(m));
  } catch (const StructuralError& e) {
    throw ParseError(std::string("invalid shape: ") + e.what());
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid shape: ") + e.what());
  }
}

inline Shape load_shape(const std::string& path) { return parse_shape(read_file(path)); }

inline json shape_json(const Shape& s) {
  json out = json::object();
  if (const auto* h = std::get_if<PolyShape>(&s)) {
    out["polygons"] = json::array();
    for (const auto& t : h->terms) {
      json verts = json::array();
      for (const auto& p : t.polygon.vertices()) verts.push_back(detail::point_json(p));
      out["polygons"].push_back({{"vertices", verts}, {"weight", t.weight}});
    }
  } else {
    out["points"] = json::array();
    for (const auto& m : std::get<PointMassShape>(s).masses())
      out["points"].push_back({{"point", detail::point_json(m.point)}, {"weight", m.weight}});
  }
  return out;
}

/// Whitespace-separated integer rows; blank lines and '#' comments ignored.
inline std::vector<std::vector<std::int64_t>> parse_text_grid(const std::string& text) {
  std::vector<std::vector<std::int64_t>> grid;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<std::int64_t> row;
    std::string tok;
    while (ls >> tok) {
      std::int64_t v = 0;
      auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || end != tok.data() + tok.size()) throw ParseError("bad grid entry '" + tok + "'");
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!grid.empty() && row.size() != grid.front().size()) throw ParseError("grid rows have different lengths");
    grid.push_back(std::move(row));
  }
  if (grid.empty()) throw ParseError("empty grid");
  return grid;
}

inline json complex_json(const ConstructibleFn& f) {
  json cells = json::array();
  const auto& cs = f.complex().cells();
  for (std::size_t i = 0; i < cs.size(); ++i)
    cells.push_back({{"id", cs[i].id.value}, {"dim", cs[i].dim}, {"weight", f.weight_at(i)}});
  return {{"cells", cells}, {"integral", euler_integral(f)}};
}

// ---------------------------------------------------------------------------
// Profiles

inline void write_profile_csv(const TransformProfile& p, std::ostream& os) {
  os << "theta,t,value\n";
  for (std::size_t i = 0; i < p.thetas.size(); ++i)
    for (std::size_t j = 0; j < p.ts.size(); ++j)
      os << format_double(p.thetas[i]) << ',' << format_double(p.ts[j]) << ',' << p.values[i][j] << '\n';
}

struct ProfileRow {
  double theta = 0;
  double t = 0;
  std::int64_t value = 0;
};

inline std::vector<ProfileRow> read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "theta,t,value") throw ParseError("missing CSV header theta,t,value");
  std::vector<ProfileRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto a = line.find(','), b = line.find(',', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw ParseError("bad CSV row '" + line + "'");
    ProfileRow r;
    r.theta = parse_double(std::string_view(line).substr(0, a));
    r.t = parse_double(std::string_view(line).substr(a + 1, b - a - 1));
    const std::string_view v = std::string_view(line).substr(b + 1);
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), r.value);
    if (ec != std::errc{} || end != v.data() + v.size()) throw ParseError("bad CSV value '" + std::string(v) + "'");
    rows.push_back(r);
  }
  return rows;
}

inline json curves_json(const TransformProfile& p) {
  json curves = json::array();
  for (const auto& c : p.critical_curves) {
    json terms = json::array();
    std::int64_t total = 0;
    for (const auto& [idx, w] : c.terms) {
      terms.push_back({{"term", idx}, {"weight", w}});
      total += w;
    }
    curves.push_back({{"vertex", detail::point_json(c.site)},
                      {"curve", c.formula},
                      {"terms", terms},
                      {"weight_sum", total}});
  }
  return {{"kernel", kernel_name(p.kernel.kind)}, {"critical_curves", curves}};
}

inline json report_json(const ReconstructionReport& r, const KernelPair& pair) {
  json mism = json::array();
  for (std::size_t i : r.mismatches)
    mism.push_back({{"point", detail::point_json(r.points[i])}, {"recovered", r.recovered[i]}, {"truth", r.truth[i]}});
  return {{"kernel", kernel_name(pair.forward.kind)},
          {"dual", kernel_name(pair.dual.kind)},
          {"mu", pair.mu},
          {"lambda", pair.lambda},
          {"queries", r.points.size()},
          {"exact_matches", r.exact_matches},
          {"all_exact", r.all_exact()},
          {"mismatches", mism}};
}

}  // namespace eulercalc::io
