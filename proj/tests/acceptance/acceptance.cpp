// One PASS/FAIL line per acceptance criterion, with the measured numbers and
// the wall time. Exit status is the number of failed criteria.

#include "oracles.hpp"

#include "eqkit/constraints.hpp"
#include "eqkit/flows.hpp"
#include "eqkit/geometry.hpp"
#include "eqkit/maxwellian.hpp"
#include "eqkit/surface.hpp"
#include "eqkit/symmetry.hpp"
#include "eqkit/transport.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace test;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Appends "name=value" to the detail and folds `ok` into the verdict.
struct Recorder {
  Outcome out;
  void note(const std::string& name, double value, bool ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g%s", out.detail.empty() ? "" : " ", name.c_str(), value,
                  ok ? "" : "(!)");
    out.detail += buf;
    out.pass = out.pass && ok;
  }
  void note(const std::string& name, const std::string& value, bool ok) {
    out.detail += (out.detail.empty() ? "" : " ") + name + "=" + value + (ok ? "" : "(!)");
    out.pass = out.pass && ok;
  }
};

std::map<std::string, Domain> shapes() {
  std::map<std::string, Domain> m;
  for (auto& nd : catalogue()) m.emplace(nd.name, nd.domain);
  return m;
}

int specular_null_dim(const Domain& d, std::size_t samples, std::uint64_t seed = 42) {
  return nullspace(assemble(d.sample_boundary(samples, seed), BcKind::Specular, d.dim())).null_dim;
}

Outcome transport_residual_check(double seconds_limit) {
  Recorder r;
  Gen g(12);
  double worst = 0.0, worst_fd = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 10000; ++i) {
    const Dim d = i % 2 ? Dim::Three : Dim::Two;
    const MaxwellianParams p = g.params(d);
    const double t = g.uni(-1, 1);
    const Vec x = g.vec(d, 1), v = g.vec(d, 1);
    const double m = oracle_m(p, t, x, v);
    const double res = transport_residual(p, {t, x, v});
    const double bound = m * (1 + v.norm()) * std::pow(1 + x.norm() + std::abs(t) * v.norm(), 2);
    worst = std::max(worst, std::abs(res) / bound);
    worst_fd = std::max(worst_fd, std::abs(res - fd_residual(p, t, x, v)) / m);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.note("max_normalized", worst, worst <= 1e-8);
  r.note("fd_agreement", worst_fd, worst_fd <= 1e-4);
  r.note("seconds", secs, secs < seconds_limit);
  return r.out;
}

Outcome factorization_check() {
  Recorder r;
  Gen g(15);
  double trip = 0.0, routes = 0.0, phi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Dim d = i % 2 ? Dim::Three : Dim::Two;
    const MaxwellianParams p = g.params(d);
    const double t = window_time(g, p);
    const Vec x = g.vec(d, 1), v = g.vec(d, 1);
    const Factorization f = factor(p, t, x);
    trip = std::max(trip, rel_err(f.rho * std::exp(-f.a * (v - f.u).squaredNorm()), oracle_m(p, t, x, v)));
    routes = std::max(routes, rel_err(f.rho, f.rho_explicit));
    const double s = sigma0(p, t);
    phi = std::max(phi, std::abs(s * s * f.form.phi - (4 * p.alpha * p.gamma - p.beta * p.beta) / 4));
  }
  r.note("round_trip", trip, trip <= 1e-10);
  r.note("rho_routes", routes, routes <= 1e-9);
  r.note("sigma0^2_phi", phi, phi <= 1e-8);
  return r.out;
}

Outcome bounce_back_check() {
  Recorder r;
  const auto m = shapes();
  for (const char* name : {"half_plane", "slab_2d", "disk", "annulus", "ellipse", "half_space", "slab_3d",
                           "sphere", "cylinder", "torus", "triaxial"}) {
    const Domain& d = m.at(name);
    const int n = nullspace(assemble(d.sample_boundary(256, 42), BcKind::BounceBack, d.dim()), 1e-7).null_dim;
    r.note(name, std::to_string(n), n == 0);
  }
  return r.out;
}

Outcome specular_2d_check() {
  Recorder r;
  const auto m = shapes();
  const std::vector<std::pair<const char*, int>> expect = {
      {"half_plane", 4}, {"slab_2d", 2}, {"disk", 1}, {"annulus", 1}, {"ellipse", 0}};
  for (const auto& [name, want] : expect) {
    std::string dims;
    bool ok = true;
    for (std::size_t s : {128, 256, 512}) {
      const int n = specular_null_dim(m.at(name), s);
      dims += (dims.empty() ? "" : "/") + std::to_string(n);
      ok = ok && n == want;
    }
    r.note(name, dims, ok);
  }
  return r.out;
}

Outcome specular_3d_check() {
  Recorder r;
  const auto m = shapes();
  const std::vector<std::pair<const char*, int>> expect = {
      {"half_space", 7}, {"slab_3d", 5}, {"cylinder", 3}, {"coaxial", 3}, {"sphere", 3},
      {"spheroid", 1}, {"torus", 1}, {"helical", 1}, {"elliptic_cylinder", 2}, {"triaxial", 0}};
  for (const auto& [name, want] : expect) {
    const int n = specular_null_dim(m.at(name), 256);
    r.note(name, std::to_string(n), n == want);
  }
  const Domain& h = m.at("helical");
  const SymmetryClass c = classify(nullspace(assemble(h.sample_boundary(256, 42), BcKind::Specular, Dim::Three)));
  const double err = c.detected.pitch_p ? std::abs(*c.detected.pitch_p - 0.3) : 1.0;
  r.note("pitch_err", err, err <= 3e-7);
  return r.out;
}

Outcome forward_generator_check() {
  Recorder r;
  Gen g(43);
  double disk = 0, cyl = 0, sph = 0, hs = 0;
  auto th = [](Dim dim, double a, double b, const Vec& z, const Vec& w1, const Vec& w2) {
    MaxwellianParams p;
    p.dim = dim;
    p.alpha = a;
    p.beta = b;
    p.lambda = z;
    p.w1 = w1;
    p.w2 = w2;
    return to_theta(p);
  };
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t seed = 1000 + i;
    const Vec y = g.vec(Dim::Two, 2);
    const Vec z2(0, 0, g.uni(-1, 1));
    const auto dsk = Domain(Dim::Two, Ball{y, g.uni(0.5, 2)}).sample_boundary(256, seed);
    disk = std::max(disk, constraint_residual(th(Dim::Two, 0, 0, z2, Vec::Zero(), -z2.cross(y)), dsk,
                                              BcKind::Specular, Dim::Two));

    const Vec axis = g.unit(Dim::Three), p = g.vec(Dim::Three, 2);
    const auto c = Domain(Dim::Three, Cylinder{p, axis, 1.0, 1.0}).sample_boundary(256, seed);
    const Vec z = g.uni(-1, 1) * axis;
    cyl = std::max(cyl, constraint_residual(th(Dim::Three, 0, 0, z, g.uni(-1, 1) * axis,
                                               -z.cross(p) + g.uni(-1, 1) * axis),
                                            c, BcKind::Specular, Dim::Three));

    const auto s = Domain(Dim::Three, Ball{p, 1.3}).sample_boundary(256, seed);
    const Vec zs = g.vec(Dim::Three, 1);
    sph = std::max(sph, constraint_residual(th(Dim::Three, 0, 0, zs, Vec::Zero(), -zs.cross(p)), s,
                                            BcKind::Specular, Dim::Three));

    const Vec n = g.unit(Dim::Three);
    const double x0 = g.uni(-2, 2), al = g.uni(-1, 1), be = g.uni(-1, 1);
    Vec e1, e2;
    orthonormal_frame(n, e1, e2);
    const auto h = Domain(Dim::Three, HalfSpace{n, x0, 1.0}).sample_boundary(256, seed);
    const Vec zn = g.uni(-1, 1) * n, foot = x0 * n;
    hs = std::max(hs, constraint_residual(th(Dim::Three, al, be, zn, -al * foot + g.uni(-1, 1) * e1,
                                             -0.5 * be * foot - zn.cross(foot) + g.uni(-1, 1) * e2),
                                          h, BcKind::Specular, Dim::Three));
  }
  r.note("disk", disk, disk <= 1e-10);
  r.note("cylinder", cyl, cyl <= 1e-10);
  r.note("sphere", sph, sph <= 1e-10);
  r.note("half_space", hs, hs <= 1e-10);
  return r.out;
}

Outcome flows_check() {
  Recorder r;
  Gen g(63);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AffineField f = random_field(g);
    const Vec x0 = g.vec(f.dim, 1);
    const FlowCurve rk = rk4_flow(f, x0, 10.0, 10000);
    const FlowCurve cf = closed_form_flow(f, x0, rk.times);
    for (std::size_t k = 0; k < rk.points.size(); ++k) {
      worst = std::max(worst, (rk.points[k] - cf.points[k]).norm() / std::max(1.0, cf.points[k].norm()));
    }
  }
  r.note("rk4_vs_closed", worst, worst <= 1e-6);

  const AffineField helix = AffineField::screw(Dim::Three, Vec::UnitZ(), 0.0, Vec(0, 0, 1));
  std::vector<double> times;
  for (int i = 0; i <= 1000; ++i) times.push_back(0.01 * i);
  const FlowCurve hc = closed_form_flow(helix, Vec(1, 0, 0), times);
  double herr = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    herr = std::max(herr, (hc.points[i] - Vec(std::cos(t), std::sin(t), t)).norm());
  }
  r.note("helix", herr, herr <= 1e-10);

  std::vector<double> short_times;
  for (int i = 0; i <= 50; ++i) short_times.push_back(0.02 * i);
  double in_null = 0.0;
  for (const auto& nd : catalogue()) {
    if (nd.specular_dim == 0) continue;
    const Dim dim = nd.domain.dim();
    const AdmissibleFamily f = nullspace(assemble(nd.domain.sample_boundary(256, 42), BcKind::Specular, dim));
    for (Eigen::Index k = 0; k < f.basis.cols(); ++k) {
      const MaxwellianParams p = from_theta(f.basis.col(k), dim, 1.0, 1.0);
      for (const AffineField& fld : {AffineField::screw(dim, p.lambda, p.beta, p.w2),
                                     AffineField::dilation(dim, p.alpha, p.w1)}) {
        for (const auto& b : nd.domain.sample_boundary(8, 5)) {
          in_null = std::max(in_null, on_surface_defect(closed_form_flow(fld, b.x, short_times), nd.domain));
        }
      }
    }
  }
  r.note("in_nullspace_defect", in_null, in_null <= 1e-8);

  const Domain torus(Dim::Three, Torus{});
  const AffineField wrong = AffineField::screw(Dim::Three, Vec::UnitX(), 0.0, Vec::Zero());
  double control = 0.0;
  for (const auto& b : torus.sample_boundary(16, 2)) {
    std::vector<double> ts;
    for (int i = 0; i <= 200; ++i) ts.push_back(0.05 * i);
    control = std::max(control, on_surface_defect(closed_form_flow(wrong, b.x, ts), torus));
  }
  r.note("torus_wrong_axis", control, control >= 1e-2);
  return r.out;
}

Outcome bracket_check() {
  Recorder r;
  Gen g(64);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double rho = g.uni(-2, 2), th = g.uni(0, 2 * kPi), lam = g.uni(-2, 2), p = g.uni(-2, 2);
    const Vec x = g.vec(Dim::Three, 2);
    const TwoAxes t = two_axes(rho, th, lam, p);
    worst = std::max(worst, (lie_bracket(t.f1, t.f2).apply(x) - two_axis_bracket(rho, th, lam, p, x)).norm());
  }
  r.note("formula", worst, worst <= 1e-12);

  auto rot = [](const Vec& z, const Vec& q) { return AffineField::screw(Dim::Three, z, 0.0, -z.cross(q)); };
  const Vec c(0.5, -0.3, 0.2);
  const auto sphere = Domain(Dim::Three, Ball{c, 1.0}).sample_boundary(256, 1);
  const double ds = tangency_defect(rot(Vec(0, 0, 1), c), rot(Vec(0.6, 0.8, 0), c), sphere);
  r.note("sphere", ds, ds <= 1e-9);
  const auto cyl = Domain(Dim::Three, Cylinder{}).sample_boundary(256, 2);
  const AffineField spin = rot(Vec(0, 0, 1), Vec::Zero());
  const double dc = tangency_defect(spin, AffineField::screw(Dim::Three, Vec::Zero(), 0.0, Vec(0, 0, 1)), cyl);
  r.note("cylinder", dc, dc <= 1e-9);
  // Rotations about concurrent axes are pointwise dependent, so the control
  // uses a perpendicular axis that misses the torus axis.
  const auto torus = Domain(Dim::Three, Torus{}).sample_boundary(256, 3);
  const double dt = tangency_defect(spin, rot(Vec(1, 0, 0), Vec(0, 2, 0)), torus);
  r.note("torus_control", dt, dt >= 1e-2);
  return r.out;
}

Outcome simulation_check(double seconds_limit) {
  Recorder r;
  const auto t0 = std::chrono::steady_clock::now();
  const Domain disk = unit_disk();
  for (double a : {0.0, 0.5}) {
    MaxwellianParams p = MaxwellianParams::global(Dim::Two, 1.0, 1.0);
    p.lambda = Vec(0, 0, a);
    const auto rep = stationarity_test(p, disk, BcKind::Specular, 100000, 2.0, 42, {0.5, 1.0, 1.5});
    const std::string tag = a == 0.0 ? "global" : "rotating";
    r.note(tag + "_max_z", rep.max_moment_z, rep.max_moment_z <= 3.0);
    r.note(tag + "_drift", rep.max_angular_drift, rep.angular_momentum_conserved && rep.max_angular_drift <= 1e-7);
  }
  MaxwellianParams p = MaxwellianParams::global(Dim::Two, 1.0, 1.0);
  p.lambda = Vec(0, 0, 0.5);
  const auto bad = stationarity_test(p, ellipse(), BcKind::Specular, 100000, 10.0, 42, {2.5, 5.0, 7.5});
  r.note("ellipse_second_z", bad.max_second_moment_z, bad.max_second_moment_z >= 5.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.note("seconds", secs, secs < seconds_limit);
  return r.out;
}

Outcome parser_check() {
  Recorder r;
  int passed = 0, errors = 0;
  for (const Case& c : kCorpus) {
    bool ok = false;
    if (c.error) {
      ++errors;
      try {
        parse_surface(c.src, c.dim);
      } catch (const ParseError& e) {
        ok = e.kind() == *c.error && (c.offset < 0 || e.offset() == static_cast<std::size_t>(c.offset));
      }
    } else {
      try {
        ok = std::abs(parse_surface(c.src, c.dim).eval(c.at) - *c.value) <= 1e-14 * std::max(1.0, std::abs(*c.value));
      } catch (const Error&) {
      }
    }
    passed += ok;
  }
  const int total = static_cast<int>(std::size(kCorpus));
  r.note("corpus", std::to_string(passed) + "/" + std::to_string(total), passed == total && total >= 30);
  r.note("error_cases", std::to_string(errors), errors > 0);

  Gen g(22);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Dim dim = i % 2 ? Dim::Three : Dim::Two;
    const SurfaceExpr e = parse_surface(random_expr(g, dim, 4), dim);
    const Vec x = g.vec(dim, 1.5);
    const Dual d = e.eval_grad(x);
    const double h = 1e-6;
    for (int k = 0; k < size(dim); ++k) {
      Vec dx = Vec::Zero();
      dx(k) = h;
      const double fd = (e.eval(x + dx) - e.eval(x - dx)) / (2 * h);
      worst = std::max(worst, std::abs(d.grad(k) - fd) / std::max({1.0, std::abs(fd), std::abs(d.grad(k))}));
    }
  }
  r.note("dual_vs_fd", worst, worst <= 1e-6);
  return r.out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double seconds_limit;  // 0: none beyond the test timeout
  };
  const std::vector<Criterion> criteria = {
      {1, "transport residual", [] { return transport_residual_check(2.0); }, 2.0},
      {2, "factorization round trip", factorization_check, 0},
      {3, "bounce-back null dimension", bounce_back_check, 0},
      {4, "specular d=2 dimensions", specular_2d_check, 0},
      {5, "specular d=3 dimensions", specular_3d_check, 30.0},
      {6, "forward generator checks", forward_generator_check, 0},
      {7, "flows", flows_check, 0},
      {8, "lie bracket and tangency", bracket_check, 0},
      {9, "simulation oracle", [] { return simulation_check(60.0); }, 60.0},
      {10, "parser and autodiff", parser_check, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.seconds_limit > 0 && secs >= c.seconds_limit) o.pass = false;
    failed += !o.pass;
    std::printf("%s %2d %-28s %.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
