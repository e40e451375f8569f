// eulercalc: command-line front end.
//
// Exit codes: 0 ok, 1 inversion mismatch or other failure, 2 parse error,
// 3 unsupported kernel/shape combination, 4 inexact division, 5 kernel
// constants mismatch.

#include <png.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eulercalc/eulercalc.hpp"
#include "eulercalc/io.hpp"

using namespace eulercalc;
using json = nlohmann::json;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitParse = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitDivision = 4;
constexpr int kExitKernel = 5;

struct KernelArgs {
  std::string kind = "sublevel";
  std::string radius = "1";
  std::string cone;  // "r1x,r1y,r2x,r2y"
  std::string blur;  // "x,y;x,y;..."
};

struct Common {
  std::optional<double> tolerance;
  std::string format = "text";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

Point2 parse_point(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() != 2) throw ParseError("expected a point 'x,y', got '" + s + "'");
  return Point2{parse_rational(parts[0]), parse_rational(parts[1])};
}

KernelSpec make_kernel(const KernelArgs& a) {
  KernelSpec k;
  k.kind = parse_kernel_kind(a.kind);
  k.disc_radius = parse_rational(a.radius);
  if (!a.cone.empty()) {
    auto p = split(a.cone, ',');
    if (p.size() != 4) throw ParseError("--cone expects r1x,r1y,r2x,r2y");
    k.cone_r1 = Vec2{parse_rational(p[0]), parse_rational(p[1])};
    k.cone_r2 = Vec2{parse_rational(p[2]), parse_rational(p[3])};
  }
  if (!a.blur.empty()) {
    std::vector<Point2> v;
    for (const auto& q : split(a.blur, ';')) v.push_back(parse_point(q));
    k.blur = ConvexPolygon(v);
  }
  try {
    k.validate();
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
  return k;
}

void add_kernel_options(CLI::App* cmd, KernelArgs& k) {
  cmd->add_option("-k,--kernel", k.kind,
                  "sublevel | superlevel | hyperplane | disc-level | disc-sublevel | disc-superlevel | cone | blur")
      ->capture_default_str();
  cmd->add_option("--radius", k.radius, "disc radius for disc kernels")->capture_default_str();
  cmd->add_option("--cone", k.cone, "cone generators r1x,r1y,r2x,r2y (default 1,0,0,1)");
  cmd->add_option("--blur", k.blur, "blur filter vertices 'x,y;x,y;...' (default the origin)");
}

TransformOptions options(const Common& c) {
  TransformOptions o;
  if (c.tolerance) {
    o.sweep.tolerance = *c.tolerance;
  } else if (const char* env = std::getenv("EC_TOLERANCE")) {
    try {
      o.sweep.tolerance = io::parse_double(env);
    } catch (const ParseError&) {
      throw ParseError(std::string("EC_TOLERANCE is not a number: ") + env);
    }
  }
  if (!(o.sweep.tolerance > 0)) throw ParseError("tolerance must be positive");
  return o;
}

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ParseError("cannot write '" + path + "'");
  return file;
}

std::vector<std::vector<std::int64_t>> read_png_mask(const std::string& path, int threshold) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) throw ParseError("cannot read PNG '" + path + "'");
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ParseError("cannot decode PNG '" + path + "'");
  }
  std::vector<std::vector<std::int64_t>> grid(image.height, std::vector<std::int64_t>(image.width));
  for (png_uint_32 i = 0; i < image.height; ++i)
    for (png_uint_32 j = 0; j < image.width; ++j) grid[i][j] = buf[i * image.width + j] >= threshold ? 1 : 0;
  return grid;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

BoundingBox invert_window(const KernelSpec& k, const Shape& s) {
  if (is_disc_kind(k.kind)) return BoundingBox{-k.disc_radius, -k.disc_radius, k.disc_radius, k.disc_radius};
  auto b = support_box(s);
  if (!b) return BoundingBox{make_rational(-1), make_rational(-1), make_rational(1), make_rational(1)};
  return b->inflated(make_rational(1));
}

// ---------------------------------------------------------------------------

int cmd_integrate(const std::string& path, const Common& c) {
  const Shape s = io::load_shape(path);
  const std::int64_t v = std::visit([](const auto& h) { return shape_integral(h); }, s);
  if (c.format == "json")
    std::cout << json{{"integral", v}}.dump() << "\n";
  else
    std::cout << v << "\n";
  return 0;
}

struct TransformArgs {
  std::string shape;
  int directions = 16;
  int t_samples = 32;
  std::string window;
  std::string out;
};

int cmd_transform(const TransformArgs& a, const KernelArgs& ka, const Common& c) {
  const KernelSpec k = make_kernel(ka);
  const TransformOptions opt = options(c);
  const Shape s = io::load_shape(a.shape);
  if (a.directions < 1 || a.t_samples < 1) throw ParseError("--directions and --t-samples must be at least 1");
  std::optional<ProfileWindow> w;
  if (!a.window.empty()) {
    auto p = split(a.window, ',');
    if (p.size() != 2) throw ParseError("--window expects lo,hi");
    w = ProfileWindow{io::parse_double(p[0]), io::parse_double(p[1])};
    if (!(w->lo <= w->hi)) throw ParseError("--window needs lo <= hi");
  }
  const TransformProfile prof =
      std::visit([&](const auto& h) { return export_profile(k, h, a.directions, a.t_samples, w, opt); }, s);

  std::ofstream file;
  std::ostream& os = output(a.out, file);
  if (c.format == "json") {
    json j = io::curves_json(prof);
    j["thetas"] = prof.thetas;
    j["ts"] = prof.ts;
    j["values"] = prof.values;
    os << j.dump(2) << "\n";
    return 0;
  }
  io::write_profile_csv(prof, os);
  if (!a.out.empty() && a.out != "-") {
    std::string side = a.out;
    if (ends_with(side, ".csv")) side.resize(side.size() - 4);
    side += ".curves.json";
    std::ofstream sf(side);
    if (!sf) throw ParseError("cannot write '" + side + "'");
    sf << io::curves_json(prof).dump(2) << "\n";
  }
  return 0;
}

struct InvertArgs {
  std::string shape;
  std::string grid = "9x9";
  std::string window;
  int extra_random = 0;
  std::uint64_t seed = 0;
  bool features = false;
  std::string out;
};

int cmd_invert(const InvertArgs& a, const KernelArgs& ka, const Common& c) {
  const KernelSpec k = make_kernel(ka);
  const TransformOptions opt = options(c);
  const Shape s = io::load_shape(a.shape);
  const KernelPair pair = standard_pair(k);

  GridSpec g;
  auto dims = split(a.grid, 'x');
  if (dims.size() != 2) throw ParseError("--grid expects AxB");
  try {
    g.nx = std::stoi(dims[0]);
    g.ny = std::stoi(dims[1]);
  } catch (const std::exception&) {
    throw ParseError("--grid expects AxB");
  }
  if (g.nx < 1 || g.ny < 1 || a.extra_random < 0) throw ParseError("grid sizes must be positive");
  g.extra_random = a.extra_random;
  g.seed = a.seed;
  g.include_features = a.features;
  g.window = invert_window(k, s);
  if (!a.window.empty()) {
    auto p = split(a.window, ',');
    if (p.size() != 4) throw ParseError("--window expects xmin,ymin,xmax,ymax");
    g.window = BoundingBox{parse_rational(p[0]), parse_rational(p[1]), parse_rational(p[2]), parse_rational(p[3])};
  }

  const ReconstructionReport rep =
      std::visit([&](const auto& h) { return reconstruct_grid(pair, h, g, opt); }, s);
  std::ofstream file;
  std::ostream& os = output(a.out, file);
  if (c.format == "csv") {
    os << "x,y,recovered,truth\n";
    for (std::size_t i = 0; i < rep.points.size(); ++i)
      os << to_string(rep.points[i].x) << ',' << to_string(rep.points[i].y) << ',' << rep.recovered[i] << ','
         << rep.truth[i] << '\n';
  } else {
    os << io::report_json(rep, pair).dump(2) << "\n";
  }
  return rep.all_exact() ? 0 : kExitMismatch;
}

struct VerifyArgs {
  int pairs = 100;
  std::uint64_t seed = 0;
};

Point2 random_point(std::mt19937_64& rng, const KernelSpec& k) {
  const Rational lo = make_rational(-2), hi = make_rational(2);
  for (;;) {
    Point2 p{random_rational(rng, lo, hi), random_rational(rng, lo, hi)};
    if (!is_disc_kind(k.kind)) return p;
    const Rational r = k.disc_radius * make_rational(9, 10);
    p = Point2{p.x * k.disc_radius / 2, p.y * k.disc_radius / 2};
    if (dot(p, p) <= r * r) return p;
  }
}

int cmd_verify(const VerifyArgs& a, const KernelArgs& ka, const Common& c) {
  const KernelSpec k = make_kernel(ka);
  const TransformOptions opt = options(c);
  const KernelPair pair = standard_pair(k);
  if (a.pairs < 1) throw ParseError("--pairs must be at least 1");

  std::mt19937_64 rng(a.seed);
  json rows = json::array();
  int bad = 0;
  if (c.format != "json") std::cout << "x\tx'\tchi\texpected\n";
  for (int i = 0; i < a.pairs; ++i) {
    const Point2 x = random_point(rng, k);
    Point2 xp = random_point(rng, k);
    for (int diag = 1; diag >= 0; --diag) {
      const Point2& y = diag ? x : xp;
      const std::int64_t chi = kernel_chi_pair(pair, x, y, opt);
      const std::int64_t expect = (x == y) ? pair.mu : pair.lambda;
      if (chi != expect) ++bad;
      if (c.format == "json") {
        rows.push_back({{"x", {to_string(x.x), to_string(x.y)}},
                        {"x_prime", {to_string(y.x), to_string(y.y)}},
                        {"chi", chi},
                        {"expected", expect}});
      } else {
        std::cout << '(' << x.x << ',' << x.y << ")\t(" << y.x << ',' << y.y << ")\t" << chi << '\t' << expect
                  << (chi != expect ? "\tMISMATCH" : "") << '\n';
      }
    }
  }
  if (c.format == "json")
    std::cout << json{{"kernel", kernel_name(k.kind)}, {"mu", pair.mu}, {"lambda", pair.lambda}, {"rows", rows},
                      {"mismatches", bad}}
                     .dump(2)
              << "\n";
  else
    std::cout << "mismatches: " << bad << " of " << 2 * a.pairs << "\n";
  return bad == 0 ? 0 : kExitKernel;
}

struct RasterArgs {
  std::string input;
  int threshold = 128;
  std::string dump;
};

int cmd_rasterize(const RasterArgs& a, const Common& c) {
  std::vector<std::vector<std::int64_t>> grid;
  if (ends_with(a.input, ".png") || ends_with(a.input, ".PNG"))
    grid = read_png_mask(a.input, a.threshold);
  else
    grid = io::parse_text_grid(io::read_file(a.input));
  const ConstructibleFn f = cubical_from_mask(grid);
  const std::int64_t v = euler_integral(f);
  if (c.format == "json")
    std::cout << json{{"integral", v}, {"rows", grid.size()}, {"cols", grid.front().size()}}.dump() << "\n";
  else
    std::cout << v << "\n";
  if (!a.dump.empty()) {
    std::ofstream out(a.dump);
    if (!out) throw ParseError("cannot write '" + a.dump + "'");
    out << io::complex_json(f).dump() << "\n";
  }
  return 0;
}

struct CompositeArgs {
  std::string shape;
  std::vector<std::string> at;
};

int cmd_composite(const CompositeArgs& a, const KernelArgs& ka, const Common& c) {
  const KernelSpec k = make_kernel(ka);
  const TransformOptions opt = options(c);
  const Shape s = io::load_shape(a.shape);
  const KernelPair pair = standard_pair(k);
  json rows = json::array();
  for (const auto& q : a.at) {
    const Point2 x = parse_point(q);
    const std::int64_t v = composite_eval(pair, s, x, opt);
    const std::int64_t h = std::visit([&](const auto& g) { return evaluate(g, x); }, s);
    const std::int64_t c_int = std::visit([](const auto& g) { return shape_integral(g); }, s);
    const std::int64_t predicted = (pair.mu - pair.lambda) * h + pair.lambda * c_int;
    if (c.format == "json")
      rows.push_back({{"x", {to_string(x.x), to_string(x.y)}}, {"composite", v}, {"predicted", predicted}});
    else
      std::cout << v << "\n";
  }
  if (c.format == "json") std::cout << rows.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euler calculus on constructible functions: integrals, Radon transforms, inversion"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--tolerance", common.tolerance, "floating-point comparison tolerance (overrides EC_TOLERANCE)");
  app.add_option("--format", common.format, "output format: text | json | csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  std::string integrate_path;
  auto* integrate = app.add_subcommand("integrate", "print the Euler integral of a shape");
  integrate->add_option("shape", integrate_path)->required();

  TransformArgs targs;
  KernelArgs tk;
  auto* transform = app.add_subcommand("transform", "sample a forward transform over (theta, t)");
  transform->add_option("shape", targs.shape)->required();
  add_kernel_options(transform, tk);
  transform->add_option("--directions", targs.directions)->capture_default_str();
  transform->add_option("--t-samples", targs.t_samples)->capture_default_str();
  transform->add_option("--window", targs.window, "t-window lo,hi");
  transform->add_option("-o,--output", targs.out, "CSV path; a .curves.json sidecar is written next to it");

  InvertArgs iargs;
  KernelArgs ik;
  auto* invert = app.add_subcommand("invert", "reconstruct a shape from its transform on a grid");
  invert->add_option("shape", iargs.shape)->required();
  add_kernel_options(invert, ik);
  invert->add_option("--grid", iargs.grid, "AxB query grid")->capture_default_str();
  invert->add_option("--window", iargs.window, "xmin,ymin,xmax,ymax (default: support box grown by 1)");
  invert->add_option("--extra-random", iargs.extra_random)->capture_default_str();
  invert->add_option("--seed", iargs.seed)->capture_default_str();
  invert->add_flag("--features", iargs.features, "also query vertices and edge midpoints");
  invert->add_option("-o,--output", iargs.out);

  VerifyArgs vargs;
  KernelArgs vk;
  auto* verify = app.add_subcommand("verify-kernel", "check the kernel-pair constants on random point pairs");
  add_kernel_options(verify, vk);
  verify->add_option("--pairs", vargs.pairs)->capture_default_str();
  verify->add_option("--seed", vargs.seed)->capture_default_str();

  RasterArgs rargs;
  auto* rasterize = app.add_subcommand("rasterize", "Euler integral of a pixel mask (PNG or text grid)");
  rasterize->add_option("mask", rargs.input)->required();
  rasterize->add_option("--threshold", rargs.threshold, "PNG gray level counted as foreground")->capture_default_str();
  rasterize->add_option("--dump", rargs.dump, "write the cubical complex as JSON");

  CompositeArgs cargs;
  KernelArgs ck;
  auto* composite = app.add_subcommand("composite", "evaluate the composite transform at points");
  composite->add_option("shape", cargs.shape)->required();
  add_kernel_options(composite, ck);
  composite->add_option("--at", cargs.at, "query point x,y (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*integrate) return cmd_integrate(integrate_path, common);
    if (*transform) return cmd_transform(targs, tk, common);
    if (*invert) return cmd_invert(iargs, ik, common);
    if (*verify) return cmd_verify(vargs, vk, common);
    if (*rasterize) return cmd_rasterize(rargs, common);
    if (*composite) return cmd_composite(cargs, ck, common);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const UnsupportedCombination& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const NonInvertibleKernel& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const ExactDivisionError& e) {
    std::cerr << "inexact division: " << e.what() << "\n";
    return kExitDivision;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  }
  return 0;
}
