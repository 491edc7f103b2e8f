#pragma once

// Reads an admissible family back as a symmetry class of the domain.
//
// The nullspace basis is split into its (α, β, Λ, w1, w2) blocks. Block
// ranks come from singular values, so the answer does not depend on which
// orthonormal basis of the family was handed in.

#include "eqkit/constraints.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace eqkit {

enum class SymmetryCase {
  GlobalOnly,
  HalfSpace,
  Slab,
  DiskOrAnnulus,
  CylinderOfRevolution,
  Sphere,
  HelicalSurface,
  GeneralizedCylinder,
  Unrecognized,
};

std::string_view to_string(SymmetryCase c);

struct SymmetryFlags {
  bool has_alpha_dilation = false;
  bool has_beta_dilation = false;
  int rotation_dims = 0;
  int translation_dims = 0;
  bool helical_coupling = false;
};

// Geometry recovered from the family. Directions are unit and sign-fixed so
// that their largest component is positive.
struct DetectedGeometry {
  std::optional<Vec> axis_point;  // closest point of the axis to the origin
  std::optional<Vec> axis_dir;    // axis, or the normal for half-space/slab
  std::optional<Vec> center;      // sphere/disk center, half-space foot point
  std::optional<double> pitch_p;  // axial advance per radian
};

struct SymmetryClass {
  SymmetryCase kind = SymmetryCase::Unrecognized;
  DetectedGeometry detected;
  SymmetryFlags flags;
};

SymmetryClass classify(const AdmissibleFamily& family);

// θ = Σ coeffs_k basis_k plus the given γ, r0. Throws CoeffLengthMismatch.
MaxwellianParams family_to_maxwellians(const AdmissibleFamily& family, double gamma, double r0,
                                       const std::vector<double>& coeffs);

}  // namespace eqkit
