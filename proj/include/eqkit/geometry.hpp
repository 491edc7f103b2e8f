#pragma once

// Domains, boundary sampling, normals and the two wall laws.
//
// Every shape carries an implicit function g with g < 0 inside the domain
// and g = 0 on the boundary; grad g points outward. Built-ins use closed
// forms, expression shapes go through the surface DSL.

#include "eqkit/surface.hpp"
#include "eqkit/vec.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace eqkit {

// {x : x·n < x0}
struct HalfSpace {
  Vec n = Vec::UnitZ();
  double x0 = 0.0;
  double extent = 1.0;  // half-width of the sampled patch around the foot point
};

// {x : min(x1,x2) < x·n < max(x1,x2)}
struct Slab {
  Vec n = Vec::UnitZ();
  double x1 = 0.0;
  double x2 = 1.0;
  double extent = 1.0;
};

// Disk in d=2, solid ball in d=3.
struct Ball {
  Vec center = Vec::Zero();
  double radius = 1.0;
};

// Annulus in d=2, spherical shell in d=3.
struct Shell {
  Vec center = Vec::Zero();
  double r_inner = 0.5;
  double r_outer = 1.0;
};

struct Cylinder {
  Vec axis_point = Vec::Zero();
  Vec axis_dir = Vec::UnitZ();
  double radius = 1.0;
  double half_length = 1.0;  // sampled axial extent
};

struct CoaxialCylinders {
  Vec axis_point = Vec::Zero();
  Vec axis_dir = Vec::UnitZ();
  double r_inner = 0.5;
  double r_outer = 1.0;
  double half_length = 1.0;
};

// Ellipse in d=2. `axes` columns are the principal directions.
struct Ellipsoid {
  Vec center = Vec::Zero();
  Vec semi_axes = Vec::Ones();
  Mat3 axes = Mat3::Identity();
};

struct Torus {
  Vec center = Vec::Zero();
  Vec axis_dir = Vec::UnitZ();
  double major_r = 2.0;
  double minor_r = 1.0;
};

// Sweep of a planar profile under the screw motion that turns by θ and
// advances pθ along the axis (axial shift 2πp per turn). The profile is a
// d=2 expression in co-rotating coordinates: a point at axial height s and
// in-plane coordinates (ξ, η) maps to R(-s/p)(ξ, η).
struct HelicalSurface {
  Vec axis_point = Vec::Zero();
  Vec axis_dir = Vec::UnitZ();
  double pitch = 0.3;
  SurfaceExpr profile;
  Vec profile_lo = Vec(-2, -2, 0);  // sampling box of the profile curve
  Vec profile_hi = Vec(2, 2, 0);
  double half_length = 1.0;
  Vec ref_dir = Vec::Zero();  // in-plane x axis; zero picks one
};

// Union of lines parallel to `direction` through a planar cross-section,
// given in the (e1, e2) frame orthogonal to it, relative to `point`.
struct GeneralizedCylinder {
  Vec direction = Vec::UnitZ();
  Vec point = Vec::Zero();
  SurfaceExpr cross_section;
  Vec section_lo = Vec(-2, -2, 0);
  Vec section_hi = Vec(2, 2, 0);
  double half_length = 1.0;
  Vec ref_dir = Vec::Zero();
};

// g(x) = expr(rotᵀ (x - shift)); sampled inside [lo, hi].
struct Implicit {
  SurfaceExpr expr;
  Vec lo = -Vec::Ones();
  Vec hi = Vec::Ones();
  Mat3 rot = Mat3::Identity();
  Vec shift = Vec::Zero();
};

using Shape = std::variant<HalfSpace, Slab, Ball, Shell, Cylinder, CoaxialCylinders, Ellipsoid,
                           Torus, HelicalSurface, GeneralizedCylinder, Implicit>;

struct BoundarySample {
  Vec x = Vec::Zero();
  Vec n = Vec::Zero();
};

struct Box {
  Vec lo = Vec::Zero();
  Vec hi = Vec::Zero();
};

class Domain {
 public:
  // Validates the shape (unit vectors, radii, dimension support) and
  // normalizes direction vectors. Throws InvalidArgument / DimensionMismatch.
  Domain(Dim dim, Shape shape);

  Dim dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  std::string kind() const;  // TOML spelling, e.g. "coaxial_cylinders"
  bool bounded() const;

  double g(const Vec& x) const;
  Dual g_grad(const Vec& x) const;
  // Outward unit normal; throws DegenerateGradient when |∇g| < 1e-12.
  Vec normal(const Vec& x) const;
  bool contains(const Vec& x, double tol = 0.0) const { return g(x) <= tol; }

  // |g|/|∇g|: first-order distance to the boundary.
  double boundary_distance(const Vec& x) const;

  // Characteristic size used to make tolerances relative.
  double length_scale() const;
  // Bounding box of the closed domain (bounded shapes only).
  Box bounding_box() const;

  // Deterministic for a given seed. Throws ProjectionFailed for expression
  // shapes when fewer than `count` points converge in 100·count attempts.
  std::vector<BoundarySample> sample_boundary(std::size_t count, std::uint64_t seed) const;

  // Image of the domain under x ↦ R x + t (R a rotation).
  Domain transformed(const Mat3& rot, const Vec& shift) const;

 private:
  Dim dim_;
  Shape shape_;
};

// Projects x onto {g = 0} by Newton steps along ∇g. Returns false when
// |g| ≤ tol is not reached within max_iter steps.
bool project_to_surface(const SurfaceExpr& e, Vec& x, double tol, int max_iter = 50);

Vec specular_reflect(const Vec& v, const Vec& n);
inline Vec bounce_back(const Vec& v) { return -v; }

}  // namespace eqkit
