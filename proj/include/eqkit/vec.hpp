#pragma once

// Small-vector conventions shared by every module.
//
// Positions and velocities are stored as 3-vectors for both d=2 and d=3; in
// d=2 the third component is identically zero. Skew-symmetric matrices are
// stored by their axis vector z with Λx = z ∧ x. In d=2 only z(2) may be
// nonzero, which reproduces Λ = ((0,-a),(a,0)) with a = z(2).

#include <Eigen/Dense>

#include <string>

namespace eqkit {

using Vec = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Dim : int { Two = 2, Three = 3 };

constexpr int size(Dim d) noexcept { return static_cast<int>(d); }

Dim dim_from_int(int d);

inline Vec cross(const Vec& a, const Vec& b) { return a.cross(b); }

// Matrix of x ↦ z ∧ x.
inline Mat3 skew(const Vec& z) {
  Mat3 m;
  m << 0.0, -z(2), z(1),
       z(2), 0.0, -z(0),
      -z(1), z(0), 0.0;
  return m;
}

// Zeroes the components that do not exist in dimension `d`.
inline Vec embed(const Vec& v, Dim d) {
  Vec out = v;
  if (d == Dim::Two) out(2) = 0.0;
  return out;
}

// Skew storage restricted to what exists in dimension `d`.
inline Vec embed_skew(const Vec& z, Dim d) {
  if (d == Dim::Two) return Vec(0.0, 0.0, z(2));
  return z;
}

// Unit vector orthogonal to `n` (|n| = 1), deterministic.
Vec any_orthogonal(const Vec& n);

// Right-handed orthonormal frame (e1, e2, n) completing unit vector n.
void orthonormal_frame(const Vec& n, Vec& e1, Vec& e2);

std::string format_vec(const Vec& v, Dim d);

}  // namespace eqkit
