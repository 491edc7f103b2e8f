#include "oracles.hpp"

#include "eqkit/error.hpp"
#include "eqkit/flows.hpp"
#include "eqkit/symmetry.hpp"

#include <doctest.h>

#include <cmath>

using namespace eqkit;
using namespace test;

namespace {

AffineField combine(double a, const AffineField& f, double b, const AffineField& g) {
  return AffineField::screw(Dim::Three, a * f.z + b * g.z, 0.0, a * f.c + b * g.c);
}

}  // namespace

TEST_CASE("closed form examples") {
  const AffineField dil = AffineField::dilation(Dim::Three, 1.0, Vec::Zero());
  for (double t : {0.0, 0.5, 1.0, 3.0}) {
    const Vec x = closed_form_point(dil, Vec(1, 0, 0), t);
    CHECK(x(0) == doctest::Approx(std::exp(t)).epsilon(1e-15));
    CHECK(x(1) == 0.0);
    CHECK(x(2) == 0.0);
  }

  const AffineField helix = AffineField::screw(Dim::Three, Vec::UnitZ(), 0.0, Vec(0, 0, 1));
  std::vector<double> times;
  for (int i = 0; i <= 1000; ++i) times.push_back(10.0 * i / 1000);
  const FlowCurve c = closed_form_flow(helix, Vec(1, 0, 0), times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    CHECK((c.points[i] - Vec(std::cos(t), std::sin(t), t)).norm() <= 1e-10);
  }

  const AffineField circle = AffineField::screw(Dim::Two, Vec(0, 0, 1), 0.0, Vec::Zero());
  Gen g(61);
  for (int i = 0; i < 100; ++i) {
    const double a = g.uni(0, 2 * kPi);
    const Vec x = closed_form_point(circle, Vec(std::cos(a), std::sin(a), 0), g.uni(0, 20));
    CHECK(std::abs(x.norm() - 1.0) <= 1e-14);
  }
}

TEST_CASE("closed form matches the definition") {
  // x(t+h) - x(t-h) over 2h against F(x(t)).
  Gen g(62);
  for (int i = 0; i < 200; ++i) {
    const AffineField f = random_field(g);
    const Vec x0 = g.vec(f.dim, 1);
    const double t = g.uni(0, 5), h = 1e-5;
    const Vec x = closed_form_point(f, x0, t);
    const Vec dx = (closed_form_point(f, x0, t + h) - closed_form_point(f, x0, t - h)) / (2 * h);
    CHECK((dx - oracle_apply(f, x)).norm() <= 1e-6 * std::max(1.0, x.norm()));
    CHECK((closed_form_point(f, x0, 0.0) - embed(x0, f.dim)).norm() <= 1e-14 * std::max(1.0, x0.norm()));
  }
}

TEST_CASE("closed form and rk4 agree") {
  Gen g(63);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AffineField f = random_field(g);
    const Vec x0 = g.vec(f.dim, 1);
    const FlowCurve rk = rk4_flow(f, x0, 10.0, 10000);
    REQUIRE(rk.points.size() == 10001);
    const FlowCurve cf = closed_form_flow(f, x0, rk.times);
    for (std::size_t k = 0; k < rk.points.size(); ++k) {
      const double err = (rk.points[k] - cf.points[k]).norm() / std::max(1.0, cf.points[k].norm());
      worst = std::max(worst, err);
    }
  }
  CHECK(worst <= 1e-6);

  const AffineField helix = AffineField::screw(Dim::Three, Vec::UnitZ(), 0.0, Vec(0, 0, 1));
  const FlowCurve rk = rk4_flow(helix, Vec(1, 0, 0), 10.0, 10000);
  double sup = 0.0;
  for (std::size_t k = 0; k < rk.points.size(); ++k) {
    const double t = rk.times[k];
    sup = std::max(sup, (rk.points[k] - Vec(std::cos(t), std::sin(t), t)).norm());
  }
  CHECK(sup <= 1e-6);

  const AffineField zero = AffineField::screw(Dim::Three, Vec::Zero(), 0.0, Vec::Zero());
  for (const Vec& x : rk4_flow(zero, Vec(1, 2, 3), 10.0, 100).points) CHECK(x == Vec(1, 2, 3));

  const AffineField dil = AffineField::dilation(Dim::Three, 1.0, Vec::Zero());
  const FlowCurve d = rk4_flow(dil, Vec(1, 0, 0), 10.0, 10000);
  for (std::size_t k = 0; k < d.points.size(); ++k) {
    CHECK(std::abs(d.points[k](0) - std::exp(d.times[k])) <= 1e-6 * std::exp(d.times[k]));
  }
}

TEST_CASE("flow argument errors") {
  const AffineField f = AffineField::dilation(Dim::Two, 1.0, Vec::Zero());
  CHECK_THROWS_AS(rk4_flow(f, Vec::Zero(), 1.0, 0), Error);
  CHECK_THROWS_AS(closed_form_flow(f, Vec::Zero(), {0.0, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(lie_bracket(f, AffineField::dilation(Dim::Three, 1.0, Vec::Zero())), Error);
}

TEST_CASE("on-surface defect") {
  const Domain disk = test::unit_disk();
  const AffineField rot = AffineField::screw(Dim::Two, Vec(0, 0, 1), 0.0, Vec::Zero());
  std::vector<double> times;
  for (int i = 0; i <= 200; ++i) times.push_back(0.05 * i);
  CHECK(on_surface_defect(closed_form_flow(rot, Vec(0.6, 0.8, 0), times), disk) <= 1e-9);

  // Helical generator on its own surface.
  const auto cat = test::catalogue();
  const auto& hx = std::find_if(cat.begin(), cat.end(), [](auto& n) { return n.name == "helical"; })->domain;
  const AffineField screw = AffineField::screw(Dim::Three, Vec::UnitZ(), 0.0, Vec(0, 0, 0.3));
  for (const auto& b : hx.sample_boundary(16, 1)) {
    CHECK(on_surface_defect(closed_form_flow(screw, b.x, times), hx) <= 1e-6);
  }

  // Rotation about a perpendicular axis leaves the torus.
  const Domain torus(Dim::Three, Torus{});
  const AffineField wrong = AffineField::screw(Dim::Three, Vec::UnitX(), 0.0, Vec::Zero());
  const auto s = torus.sample_boundary(16, 2);
  double worst = 0.0;
  for (const auto& b : s) worst = std::max(worst, on_surface_defect(closed_form_flow(wrong, b.x, times), torus));
  CHECK(worst >= 1e-2);
}

TEST_CASE("generators from the nullspace keep boundary points on the boundary") {
  std::vector<double> times;
  for (int i = 0; i <= 50; ++i) times.push_back(0.02 * i);
  for (const auto& nd : test::catalogue()) {
    if (nd.specular_dim == 0) continue;
    CAPTURE(nd.name);
    const Dim dim = nd.domain.dim();
    const AdmissibleFamily f =
        nullspace(assemble(nd.domain.sample_boundary(256, 42), BcKind::Specular, dim));
    for (Eigen::Index k = 0; k < f.basis.cols(); ++k) {
      const MaxwellianParams p = from_theta(f.basis.col(k), dim, 1.0, 1.0);
      const AffineField screw = AffineField::screw(dim, p.lambda, p.beta, p.w2);
      const AffineField dil = AffineField::dilation(dim, p.alpha, p.w1);
      for (const auto& b : nd.domain.sample_boundary(8, 5)) {
        CHECK(on_surface_defect(closed_form_flow(screw, b.x, times), nd.domain) <= 1e-8);
        CHECK(on_surface_defect(closed_form_flow(dil, b.x, times), nd.domain) <= 1e-8);
      }
    }
  }
}

TEST_CASE("bracket reproduces the two-axis formula") {
  const TwoAxes quarter = two_axes(1.0, kPi / 2, 0.0, 0.0);
  const AffineField br = lie_bracket(quarter.f1, quarter.f2);
  Gen g(64);
  for (int i = 0; i < 10; ++i) {
    const Vec x = g.vec(Dim::Three, 3);
    CHECK((br.apply(x) - Vec(1, 0, 0)).norm() <= 1e-15);
  }

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double rho = g.uni(-2, 2), th = g.uni(0, 2 * kPi), lam = g.uni(-2, 2), p = g.uni(-2, 2);
    const Vec x = g.vec(Dim::Three, 2);
    const TwoAxes t = two_axes(rho, th, lam, p);
    const Vec got = lie_bracket(t.f1, t.f2).apply(x);
    worst = std::max(worst, (got - two_axis_bracket(rho, th, lam, p, x)).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("bracket algebra") {
  Gen g(65);
  auto screw = [&]() {
    return AffineField::screw(Dim::Three, g.vec(Dim::Three, 1), 0.0, g.vec(Dim::Three, 1));
  };
  for (int i = 0; i < 100; ++i) {
    const AffineField f1 = screw(), f2 = screw(), f3 = screw();
    const Vec x = g.vec(Dim::Three, 2);
    CHECK(lie_bracket(f1, f1).apply(x).norm() == 0.0);
    CHECK((lie_bracket(f1, f2).apply(x) + lie_bracket(f2, f1).apply(x)).norm() <= 1e-14);
    const double a = g.uni(-2, 2), b = g.uni(-2, 2);
    const Vec lhs = lie_bracket(combine(a, f1, b, f2), f3).apply(x);
    const Vec rhs = a * lie_bracket(f1, f3).apply(x) + b * lie_bracket(f2, f3).apply(x);
    CHECK((lhs - rhs).norm() <= 1e-13);
    // Jacobi identity.
    const Vec jac = lie_bracket(f1, lie_bracket(f2, f3)).apply(x) +
                    lie_bracket(f2, lie_bracket(f3, f1)).apply(x) +
                    lie_bracket(f3, lie_bracket(f1, f2)).apply(x);
    CHECK(jac.norm() <= 1e-13);
    // Against the derivative definition DF1·F2 - DF2·F1.
    const Vec def = f1.matrix() * f2.apply(x) - f2.matrix() * f1.apply(x);
    CHECK((lie_bracket(f1, f2).apply(x) - def).norm() <= 1e-14);
  }
  // Rotations about one axis commute.
  const Vec axis = g.unit(Dim::Three), pt = g.vec(Dim::Three, 1);
  const AffineField r1 = AffineField::screw(Dim::Three, 0.7 * axis, 0.0, -(0.7 * axis).cross(pt));
  const AffineField r2 = AffineField::screw(Dim::Three, -1.3 * axis, 0.0, -(-1.3 * axis).cross(pt));
  CHECK(lie_bracket(r1, r2).apply(g.vec(Dim::Three, 1)).norm() <= 1e-15);
}

TEST_CASE("tangency defect") {
  const auto sphere = Domain(Dim::Three, Ball{Vec(0.5, -0.3, 0.2), 1.0}).sample_boundary(256, 1);
  const Vec c(0.5, -0.3, 0.2);
  auto rot = [](const Vec& z, const Vec& p) { return AffineField::screw(Dim::Three, z, 0.0, -z.cross(p)); };
  CHECK(tangency_defect(rot(Vec(0, 0, 1), c), rot(Vec(0.6, 0.8, 0), c), sphere) <= 1e-9);

  const auto cyl = Domain(Dim::Three, Cylinder{}).sample_boundary(256, 2);
  const AffineField spin = rot(Vec(0, 0, 1), Vec::Zero());
  const AffineField slide = AffineField::screw(Dim::Three, Vec::Zero(), 0.0, Vec(0, 0, 1));
  CHECK(tangency_defect(spin, slide, cyl) <= 1e-9);

  // Rotations about two concurrent axes give a zero triple product at every
  // point of space, so the torus control uses a perpendicular axis that is
  // skew to the torus axis.
  const auto torus = Domain(Dim::Three, Torus{}).sample_boundary(256, 3);
  CHECK(tangency_defect(spin, rot(Vec(1, 0, 0), Vec::Zero()), torus) <= 1e-9);
  CHECK(tangency_defect(spin, rot(Vec(1, 0, 0), Vec(0, 2, 0)), torus) >= 1e-2);
  Gen g(66);
  for (int i = 0; i < 50; ++i) {
    const Vec q = g.vec(Dim::Three, 2);
    CHECK(tangency_defect(rot(g.unit(Dim::Three), q), rot(g.unit(Dim::Three), q), torus) <= 1e-9);
  }
}
