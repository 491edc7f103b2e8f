#pragma once

// Shared fixtures and seeded generators for the unit tests. Generators use
// std::mt19937_64 so that they do not share code with the library's RNG.

#include "eqkit/constraints.hpp"
#include "eqkit/geometry.hpp"
#include "eqkit/maxwellian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace test {

using eqkit::Dim;
using eqkit::Vec;

struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}

  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }

  Vec vec(Dim d, double r) {
    Vec v = Vec::Zero();
    for (int k = 0; k < eqkit::size(d); ++k) v(k) = uni(-r, r);
    return v;
  }
  Vec unit(Dim d) {
    Vec v = Vec::Zero();
    do {
      for (int k = 0; k < eqkit::size(d); ++k) v(k) = normal();
    } while (v.norm() < 1e-3);
    return v.normalized();
  }
  // Random rotation from a normalized quaternion.
  eqkit::Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }

  // Parameters with all magnitudes ≤ 1 and γ ≥ 0.5 so that t = 0 is well
  // inside the positivity window.
  eqkit::MaxwellianParams params(Dim d) {
    eqkit::MaxwellianParams p;
    p.dim = d;
    p.r0 = uni(0.5, 1.0);
    p.alpha = uni(-1, 1);
    p.beta = uni(-1, 1);
    p.gamma = uni(0.5, 1.0);
    p.lambda = d == Dim::Two ? Vec(0, 0, uni(-1, 1)) : vec(d, 1.0);
    p.w1 = vec(d, 1.0);
    p.w2 = vec(d, 1.0);
    return p;
  }
};

inline eqkit::Domain unit_disk() { return eqkit::Domain(Dim::Two, eqkit::Ball{}); }

inline eqkit::Domain ellipse(double a = 2.0, double b = 1.0) {
  eqkit::Ellipsoid e;
  e.semi_axes = Vec(a, b, 0);
  return eqkit::Domain(Dim::Two, e);
}

// Every shape used by the dimension tables, with its expected specular
// null dimension. Bounce-back is 0 for all of them.
struct NamedDomain {
  std::string name;
  eqkit::Domain domain;
  int specular_dim;
};

inline std::vector<NamedDomain> catalogue() {
  using namespace eqkit;
  std::vector<NamedDomain> out;
  auto add = [&](std::string name, Dim d, Shape s, int k) {
    out.push_back({std::move(name), Domain(d, std::move(s)), k});
  };
  add("half_plane", Dim::Two, HalfSpace{Vec(0, 1, 0), 0.5, 1.0}, 4);
  add("slab_2d", Dim::Two, Slab{Vec(0.6, 0.8, 0), -1.0, 1.0, 1.0}, 2);
  add("disk", Dim::Two, Ball{Vec(0.3, -0.2, 0), 1.0}, 1);
  add("annulus", Dim::Two, Shell{Vec::Zero(), 0.5, 1.0}, 1);
  Ellipsoid el;
  el.semi_axes = Vec(2, 1, 0);
  add("ellipse", Dim::Two, el, 0);

  add("half_space", Dim::Three, HalfSpace{Vec(0, 0, 1), 2.0, 1.0}, 7);
  add("slab_3d", Dim::Three, Slab{Vec(0, 0, 1), -1.0, 1.0, 1.0}, 5);
  add("cylinder", Dim::Three, Cylinder{Vec::Zero(), Vec(0, 0, 1), 1.0, 1.0}, 3);
  add("coaxial", Dim::Three, CoaxialCylinders{Vec::Zero(), Vec(0, 0, 1), 0.5, 1.0, 1.0}, 3);
  add("sphere", Dim::Three, Ball{Vec::Zero(), 1.0}, 3);
  Ellipsoid spheroid;
  spheroid.semi_axes = Vec(1, 1, 2);
  add("spheroid", Dim::Three, spheroid, 1);
  add("torus", Dim::Three, Torus{Vec::Zero(), Vec(0, 0, 1), 2.0, 0.5}, 1);
  HelicalSurface hx;
  hx.pitch = 0.3;
  hx.profile = parse_surface("(x - 1)^2 + 4*y^2 - 0.25", Dim::Two);
  hx.profile_lo = Vec(0.4, -0.3, 0);
  hx.profile_hi = Vec(1.6, 0.3, 0);
  add("helical", Dim::Three, hx, 1);
  GeneralizedCylinder gc;
  gc.cross_section = parse_surface("x^2/4 + y^2 - 1", Dim::Two);
  gc.section_lo = Vec(-2.2, -1.2, 0);
  gc.section_hi = Vec(2.2, 1.2, 0);
  add("elliptic_cylinder", Dim::Three, gc, 2);
  Ellipsoid tri;
  tri.semi_axes = Vec(1, 1.3, 1.7);
  add("triaxial", Dim::Three, tri, 0);
  return out;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace test
