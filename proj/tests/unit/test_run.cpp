#include "eqkit/config.hpp"
#include "eqkit/error.hpp"
#include "eqkit/run.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace eqkit;

namespace {

std::string cfg(const std::string& rel) { return std::string(EQKIT_SOURCE_DIR) + "/configs/" + rel; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

std::vector<std::string> keys(const Json& j) {
  std::vector<std::string> k;
  for (auto it = j.begin(); it != j.end(); ++it) k.push_back(it.key());
  return k;
}

RunConfig classify(const std::string& domain) {
  RunConfig c;
  c.command = Command::Classify;
  c.domain_file = cfg("domains/" + domain);
  return c;
}

}  // namespace

TEST_CASE("params parsing") {
  const MaxwellianParams p = parse_params("dim = 2\ngamma = 2.0\nlambda0 = 0.5\nw1 = [1.0, 2.0]\n");
  CHECK(p.dim == Dim::Two);
  CHECK(p.gamma == 2.0);
  CHECK(p.r0 == 1.0);
  CHECK(p.lambda == Vec(0, 0, 0.5));
  CHECK(p.w1 == Vec(1, 2, 0));
  const MaxwellianParams q = parse_params("dim = 3\nlambda0 = [0, 1, 0]\nalpha = 1\n");
  CHECK(q.dim == Dim::Three);
  CHECK(q.lambda == Vec(0, 1, 0));
  CHECK(q.alpha == 1.0);

  CHECK(kind_of([] { parse_params("dim = 4\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_params("dim = 2\nw1 = [1, 2, 3]\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_params("dim = 3\nlambda0 = 0.5\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_params("dim = 2\ngamma = \"one\"\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_params("dim = [\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { load_params("/nonexistent/params.toml"); }) == ErrorKind::ConfigError);
}

TEST_CASE("domain parsing") {
  const Domain b = parse_domain("dim = 2\nkind = \"ball\"\ncenter = [0.5, 0.0]\nradius = 2.0\n");
  CHECK(b.dim() == Dim::Two);
  CHECK(b.contains(Vec(2.0, 0, 0)));
  CHECK_FALSE(b.contains(Vec(2.6, 0, 0)));
  const Domain i = parse_domain("dim = 2\nkind = \"implicit\"\nexpr = \"x^2 + y^2 - 1\"\nbbox = [[-2, -2], [2, 2]]\n");
  CHECK(std::abs(i.g(Vec(1, 0, 0))) == 0.0);

  CHECK(kind_of([] { parse_domain("dim = 2\nkind = \"blob\"\n"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_domain("dim = 2\nkind = \"ball\"\n"); }) == ErrorKind::ConfigError);
  // Shape validation surfaces as ConfigError; expression errors keep their kind.
  CHECK(kind_of([] { parse_domain("dim = 2\nkind = \"ball\"\ncenter = [0, 0]\nradius = -1\n"); }) ==
        ErrorKind::ConfigError);
  CHECK(kind_of([] {
          parse_domain("dim = 2\nkind = \"implicit\"\nexpr = \"x^2 + \"\nbbox = [[-1, -1], [1, 1]]\n");
        }) == ErrorKind::SyntaxError);

  for (const char* name : {"annulus", "cylinder", "ellipse", "half_plane", "helix",
                           "implicit_superellipse", "sphere", "torus", "unit_disk"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_domain(cfg(std::string("domains/") + name + ".toml")));
  }
}

TEST_CASE("field parsing and vectors") {
  const AffineField f = load_field(cfg("fields/helix.toml"));
  CHECK(f.kind == AffineField::Kind::Screw);
  CHECK(f.z == Vec(0, 0, 1));
  CHECK(f.c == Vec(0, 0, 1));
  CHECK(kind_of([] { parse_field("dim = 3\nkind = \"spiral\"\n"); }) == ErrorKind::ConfigError);

  CHECK(parse_vector("1,0,0") == Vec(1, 0, 0));
  CHECK(parse_vector(" 0.5 , -2 ") == Vec(0.5, -2, 0));
  CHECK(kind_of([] { parse_vector("1,x"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_vector("1,2,3,4"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_vector(""); }) == ErrorKind::ConfigError);
}

TEST_CASE("run config validation") {
  RunConfig c = classify("unit_disk.toml");
  CHECK_NOTHROW(c.validate());
  c.samples = 4;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = classify("unit_disk.toml");
  c.tol = 0.0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = classify("missing.toml");
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = RunConfig{};
  c.command = Command::Trace;
  c.field_file = cfg("fields/helix.toml");
  c.method = "euler";
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
}

TEST_CASE("classify reports") {
  const RunResult r = run(classify("unit_disk.toml"));
  CHECK(r.exit_code == 0);
  const std::vector<std::string> head{"tool", "tool_version", "command", "config"};
  const auto k = keys(r.report);
  REQUIRE(k.size() > head.size());
  CHECK(std::vector<std::string>(k.begin(), k.begin() + 4) == head);
  CHECK(r.report["command"] == "classify");
  CHECK(r.report["null_dim"] == 1);
  CHECK(r.report["classification"]["case"] == "DiskOrAnnulus");
  CHECK(r.report["forward_check"]["passed"] == true);

  // Same config, same bytes.
  CHECK(run(classify("unit_disk.toml")).report.dump() == r.report.dump());

  const RunResult torus = run(classify("torus.toml"));
  CHECK(torus.report["null_dim"] == 1);
  const RunResult helix = run(classify("helix.toml"));
  CHECK(helix.report["null_dim"] == 1);
  CHECK(std::abs(helix.report["classification"]["detected"]["pitch_p"].get<double>() - 0.3) <= 1e-6);

  RunConfig bb = classify("ellipse.toml");
  bb.bc = BcKind::BounceBack;
  CHECK(run(bb).report["null_dim"] == 0);
}

TEST_CASE("verify exit codes") {
  RunConfig c;
  c.command = Command::Verify;
  c.params_file = cfg("params/rotating_disk.toml");
  c.domain_file = cfg("domains/unit_disk.toml");
  RunResult r = run(c);
  CHECK(r.exit_code == 0);
  CHECK(r.report["admissible"] == true);

  c.domain_file = cfg("domains/ellipse.toml");
  r = run(c);
  CHECK(r.exit_code == 2);
  CHECK(r.report["admissible"] == false);
  CHECK_FALSE(r.report.contains("error"));

  c.bc = BcKind::BounceBack;
  c.params_file = cfg("params/global_2d.toml");
  CHECK(run(c).exit_code == 0);

  c.params_file = cfg("params/global_3d.toml");
  r = run(c);
  CHECK(r.exit_code == 1);
  CHECK(r.report["error"]["kind"] == "DimensionMismatch");
}

TEST_CASE("errors become reports") {
  RunConfig c = classify("nope.toml");
  const RunResult r = run(c);
  CHECK(r.exit_code == 1);
  CHECK(r.report["error"]["kind"] == "ConfigError");
  CHECK(r.report["command"] == "classify");

  RunConfig s;
  s.command = Command::Simulate;
  s.params_file = cfg("params/global_2d.toml");
  s.domain_file = cfg("domains/half_plane.toml");
  s.particles = 100;
  const RunResult u = run(s);
  CHECK(u.exit_code == 1);
  CHECK(u.report["error"]["kind"] == "UnboundedDomain");
}

TEST_CASE("trace output") {
  RunConfig c;
  c.command = Command::Trace;
  c.field_file = cfg("fields/helix.toml");
  c.x0 = Vec(1, 0, 0);
  c.t_end = 10.0;
  c.steps = 1000;
  const RunResult r = run(c);
  REQUIRE(r.exit_code == 0);
  std::istringstream in(r.csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,y,z");
  int rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    double t, x, y, z;
    char sep;
    std::istringstream ls(line);
    ls >> t >> sep >> x >> sep >> y >> sep >> z;
    worst = std::max(worst, std::hypot(x - std::cos(t), y - std::sin(t), z - t));
    ++rows;
  }
  CHECK(rows == 1001);
  CHECK(worst <= 1e-10);
  CHECK(r.report["points"] == 1001);

  c.method = "rk4";
  c.steps = 10000;
  const RunResult k = run(c);
  CHECK(k.exit_code == 0);
  const auto fp = k.report["final_point"];
  CHECK(std::hypot(fp[0].get<double>() - std::cos(10.0), fp[1].get<double>() - std::sin(10.0),
                   fp[2].get<double>() - 10.0) <= 1e-6);
}

TEST_CASE("factor and simulate reports") {
  RunConfig f;
  f.command = Command::Factor;
  f.params_file = cfg("params/time_dependent.toml");
  f.t = 0.25;
  f.x = Vec(0.1, 0.2, 0.3);
  const RunResult fr = run(f);
  CHECK(fr.exit_code == 0);
  CHECK(fr.report["pde_max_normalized_residual"].get<double>() <= 1e-8);

  RunConfig s;
  s.command = Command::Simulate;
  s.params_file = cfg("params/rotating_disk.toml");
  s.domain_file = cfg("domains/unit_disk.toml");
  s.particles = 5000;
  s.t_end = 1.0;
  const RunResult a = run(s);
  REQUIRE(a.exit_code == 0);
  const Json& st = a.report["stationarity"];
  CHECK(st["particles"] == 5000);
  // t0, three default checkpoints and t_end.
  CHECK(st["checkpoints"].size() == 5);
  CHECK(st["max_angular_drift"].get<double>() <= 1e-7);
  s.threads = 3;
  CHECK(run(s).report["stationarity"].dump() == st.dump());
}

TEST_CASE("report files") {
  const auto dir = std::filesystem::temp_directory_path() / "eqkit_test_run";
  std::filesystem::create_directories(dir);
  RunConfig c = classify("sphere.toml");
  c.dump_matrix = (dir / "m.csv").string();
  const RunResult r = run(c);
  CHECK(r.exit_code == 0);
  std::ifstream in(c.dump_matrix);
  std::string header;
  std::getline(in, header);
  CHECK(header == "alpha,beta,lambda_x,lambda_y,lambda_z,w1_x,w1_y,w1_z,w2_x,w2_y,w2_z");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(c.samples) * rows_per_sample(BcKind::Specular, Dim::Three));
  std::filesystem::remove_all(dir);
}
