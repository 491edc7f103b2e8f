#include "eqkit/config.hpp"

#include "eqkit/error.hpp"

#include <toml.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace eqkit {

namespace {

[[noreturn]] void config_error(const std::string& origin, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, origin + ": " + msg);
}

toml::table parse_toml(std::string_view text, const std::string& origin) {
  try {
    return toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ")";
    config_error(origin, os.str());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Reader {
 public:
  Reader(const toml::table& t, std::string origin) : t_(t), origin_(std::move(origin)) {}

  const std::string& origin() const { return origin_; }

  bool has(std::string_view key) const { return t_.contains(key); }

  double number(std::string_view key) const {
    const auto* node = t_.get(key);
    if (!node) fail(key, "missing");
    if (auto v = node->value<double>()) return *v;
    fail(key, "must be a number");
  }

  double number(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::string text(std::string_view key) const {
    const auto* node = t_.get(key);
    if (!node) fail(key, "missing");
    if (auto v = node->value<std::string>()) return *v;
    fail(key, "must be a string");
  }

  Vec vec(std::string_view key, int n) const {
    const auto* node = t_.get(key);
    if (!node) fail(key, "missing");
    return as_vec(*node, key, n);
  }

  Vec vec(std::string_view key, int n, const Vec& fallback) const {
    return has(key) ? vec(key, n) : fallback;
  }

  // [[lo...], [hi...]]
  void box(std::string_view key, int n, Vec& lo, Vec& hi) const {
    const auto* arr = t_.get_as<toml::array>(key);
    if (!arr || arr->size() != 2) fail(key, "must be [[lo...], [hi...]]");
    lo = as_vec(*arr->get(0), key, n);
    hi = as_vec(*arr->get(1), key, n);
  }

  Vec as_vec(const toml::node& node, std::string_view key, int n) const {
    const auto* arr = node.as_array();
    if (!arr || static_cast<int>(arr->size()) != n) {
      fail(key, "must be an array of " + std::to_string(n) + " numbers");
    }
    Vec v = Vec::Zero();
    for (int k = 0; k < n; ++k) {
      auto x = arr->get(k)->value<double>();
      if (!x) fail(key, "must contain numbers only");
      v(k) = *x;
    }
    return v;
  }

  Dim dim() const {
    const auto* node = t_.get("dim");
    if (!node) fail("dim", "missing");
    auto v = node->value<std::int64_t>();
    if (!v || (*v != 2 && *v != 3)) fail("dim", "must be 2 or 3");
    return *v == 2 ? Dim::Two : Dim::Three;
  }

  SurfaceExpr expr(std::string_view key, Dim d) const {
    const std::string src = text(key);
    try {
      return parse_surface(src, d);
    } catch (const ParseError& e) {
      throw ParseError(e.kind(), e.offset(), origin_ + ": key '" + std::string(key) + "': " +
                                                  std::string(to_string(e.kind())));
    }
  }

  [[noreturn]] void fail(std::string_view key, const std::string& msg) const {
    config_error(origin_, "key '" + std::string(key) + "' " + msg);
  }

 private:
  const toml::table& t_;
  std::string origin_;
};

}  // namespace

MaxwellianParams parse_params(std::string_view text, const std::string& origin) {
  const toml::table t = parse_toml(text, origin);
  const Reader r(t, origin);
  MaxwellianParams p;
  p.dim = r.dim();
  const int d = size(p.dim);
  p.r0 = r.number("r0", 1.0);
  p.alpha = r.number("alpha", 0.0);
  p.beta = r.number("beta", 0.0);
  p.gamma = r.number("gamma", 1.0);
  p.w1 = r.vec("w1", d, Vec::Zero());
  p.w2 = r.vec("w2", d, Vec::Zero());
  if (p.dim == Dim::Two) {
    p.lambda = Vec(0, 0, r.number("lambda0", 0.0));
  } else {
    p.lambda = r.vec("lambda0", 3, Vec::Zero());
  }
  try {
    p.validate();
  } catch (const Error& e) {
    config_error(origin, e.what());
  }
  return p;
}

MaxwellianParams load_params(const std::string& path) { return parse_params(read_file(path), path); }

Domain parse_domain(std::string_view text, const std::string& origin) {
  const toml::table t = parse_toml(text, origin);
  const Reader r(t, origin);
  const Dim dim = r.dim();
  const int d = size(dim);
  const std::string kind = r.text("kind");
  Shape shape;
  if (kind == "half_space") {
    HalfSpace s;
    s.n = r.vec("normal", d);
    s.x0 = r.number("offset", 0.0);
    s.extent = r.number("extent", s.extent);
    shape = s;
  } else if (kind == "slab") {
    Slab s;
    s.n = r.vec("normal", d);
    s.x1 = r.number("x1");
    s.x2 = r.number("x2");
    s.extent = r.number("extent", s.extent);
    shape = s;
  } else if (kind == "ball") {
    Ball s;
    s.center = r.vec("center", d, Vec::Zero());
    s.radius = r.number("radius");
    shape = s;
  } else if (kind == "annulus") {
    Shell s;
    s.center = r.vec("center", d, Vec::Zero());
    s.r_inner = r.number("r_inner");
    s.r_outer = r.number("r_outer");
    shape = s;
  } else if (kind == "cylinder") {
    Cylinder s;
    s.axis_point = r.vec("axis_point", 3, Vec::Zero());
    s.axis_dir = r.vec("axis_dir", 3, Vec::UnitZ());
    s.radius = r.number("radius");
    s.half_length = r.number("half_length", s.half_length);
    shape = s;
  } else if (kind == "coaxial_cylinders") {
    CoaxialCylinders s;
    s.axis_point = r.vec("axis_point", 3, Vec::Zero());
    s.axis_dir = r.vec("axis_dir", 3, Vec::UnitZ());
    s.r_inner = r.number("r_inner");
    s.r_outer = r.number("r_outer");
    s.half_length = r.number("half_length", s.half_length);
    shape = s;
  } else if (kind == "ellipsoid") {
    Ellipsoid s;
    s.center = r.vec("center", d, Vec::Zero());
    s.semi_axes = r.vec("semi_axes", d);
    if (const auto* arr = t.get_as<toml::array>("axes")) {
      if (static_cast<int>(arr->size()) != d) r.fail("axes", "must list one direction per axis");
      s.axes = Mat3::Identity();
      for (int k = 0; k < d; ++k) s.axes.col(k) = r.as_vec(*arr->get(k), "axes", d).normalized();
    }
    shape = s;
  } else if (kind == "torus") {
    Torus s;
    s.center = r.vec("center", 3, Vec::Zero());
    s.axis_dir = r.vec("axis_dir", 3, Vec::UnitZ());
    s.major_r = r.number("major_r");
    s.minor_r = r.number("minor_r");
    shape = s;
  } else if (kind == "helical") {
    HelicalSurface s;
    s.axis_point = r.vec("axis_point", 3, Vec::Zero());
    s.axis_dir = r.vec("axis_dir", 3, Vec::UnitZ());
    s.pitch = r.number("pitch");
    s.profile = r.expr("profile", Dim::Two);
    r.box("profile_bbox", 2, s.profile_lo, s.profile_hi);
    s.half_length = r.number("half_length", s.half_length);
    shape = s;
  } else if (kind == "generalized_cylinder") {
    GeneralizedCylinder s;
    s.direction = r.vec("direction", 3, Vec::UnitZ());
    s.point = r.vec("point", 3, Vec::Zero());
    s.cross_section = r.expr("cross_section", Dim::Two);
    r.box("section_bbox", 2, s.section_lo, s.section_hi);
    s.half_length = r.number("half_length", s.half_length);
    shape = s;
  } else if (kind == "implicit") {
    Implicit s;
    s.expr = r.expr("expr", dim);
    r.box("bbox", d, s.lo, s.hi);
    shape = s;
  } else {
    r.fail("kind", "has unknown value '" + kind + "'");
  }
  try {
    return Domain(dim, std::move(shape));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    config_error(origin, e.what());
  }
}

Domain load_domain(const std::string& path) { return parse_domain(read_file(path), path); }

AffineField parse_field(std::string_view text, const std::string& origin) {
  const toml::table t = parse_toml(text, origin);
  const Reader r(t, origin);
  const Dim dim = r.dim();
  const int d = size(dim);
  const std::string kind = r.text("kind");
  const Vec c = r.vec("c", d, Vec::Zero());
  if (kind == "dilation") return AffineField::dilation(dim, r.number("alpha"), c);
  if (kind == "screw") {
    const Vec z = dim == Dim::Two ? Vec(0, 0, r.number("lambda0", 0.0))
                                  : r.vec("lambda0", 3, Vec::Zero());
    return AffineField::screw(dim, z, r.number("beta", 0.0), c);
  }
  r.fail("kind", "must be \"dilation\" or \"screw\"");
}

AffineField load_field(const std::string& path) { return parse_field(read_file(path), path); }

Vec parse_vector(std::string_view text) {
  Vec v = Vec::Zero();
  int k = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view part = text.substr(pos, end - pos);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (k >= 3) throw Error(ErrorKind::ConfigError, "vector has more than 3 components");
    const std::string buf(part);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(buf, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (buf.empty() || used != buf.size()) {
      throw Error(ErrorKind::ConfigError, "bad vector component '" + buf + "'");
    }
    v(k++) = x;
    pos = end + 1;
  }
  return v;
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Verify: return "verify";
    case Command::Trace: return "trace";
    case Command::Simulate: return "simulate";
    case Command::Factor: return "factor";
  }
  return "classify";
}

void RunConfig::validate() const {
  auto need = [](const std::string& path, const char* what) {
    if (path.empty()) throw Error(ErrorKind::ConfigError, std::string(what) + " file is required");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::ConfigError, path + ": file does not exist");
    }
  };
  switch (command) {
    case Command::Classify: need(domain_file, "domain"); break;
    case Command::Verify:
    case Command::Simulate:
      need(domain_file, "domain");
      need(params_file, "params");
      break;
    case Command::Trace: need(field_file, "field"); break;
    case Command::Factor: need(params_file, "params"); break;
  }
  if (samples < 8) throw Error(ErrorKind::ConfigError, "samples must be at least 8");
  if (!(tol > 0.0) || !(tol < 1.0)) throw Error(ErrorKind::ConfigError, "tol must lie in (0, 1)");
  if (command == Command::Trace && steps < 1) {
    throw Error(ErrorKind::ConfigError, "steps must be at least 1");
  }
  if (command == Command::Trace && method != "closed_form" && method != "rk4") {
    throw Error(ErrorKind::ConfigError, "method must be closed_form or rk4");
  }
  if (command == Command::Simulate && particles < 1) {
    throw Error(ErrorKind::ConfigError, "particle count must be positive");
  }
  if ((command == Command::Simulate || command == Command::Trace) && !(t_end >= 0.0)) {
    throw Error(ErrorKind::ConfigError, "t_end must be non-negative");
  }
}

}  // namespace eqkit
