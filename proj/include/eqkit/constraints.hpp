#pragma once

// Boundary conditions as a linear system over the flattened parameter vector
//
//   θ = (α, β, Λ-params, w1, w2)
//
// with one Λ entry (a) for d=2 and three (z) for d=3, so |θ| = 7 or 11.
// γ and r0 never appear: both wall laws preserve |v|.

#include "eqkit/geometry.hpp"
#include "eqkit/maxwellian.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eqkit {

enum class BcKind { BounceBack, Specular };

std::string_view to_string(BcKind bc);
BcKind bc_from_string(std::string_view s);  // "bounce_back" | "specular"

// Offsets of the θ blocks.
struct ThetaLayout {
  int d;
  int nl;  // number of Λ parameters

  explicit ThetaLayout(Dim dim) : d(eqkit::size(dim)), nl(dim == Dim::Two ? 1 : 3) {}

  static constexpr int alpha = 0;
  static constexpr int beta = 1;
  static constexpr int lambda = 2;
  int w1() const { return 2 + nl; }
  int w2() const { return 2 + nl + d; }
  int size() const { return 2 + nl + 2 * d; }
};

std::vector<std::string> theta_labels(Dim dim);

Eigen::VectorXd to_theta(const MaxwellianParams& p);
// Inverse of to_theta; γ and r0 supplied separately.
MaxwellianParams from_theta(const Eigen::VectorXd& theta, Dim dim, double gamma, double r0);

// Positions enter as x = c + s·x̃. The same constraint in the scaled frame
// acts on θ̃ = T θ, with
//   α̃ = sα, β̃ = sβ, z̃ = sz, w̃1 = w1 + αc, w̃2 = w2 + βc/2 + z∧c.
struct Normalization {
  Vec center = Vec::Zero();
  double scale = 1.0;

  Eigen::MatrixXd forward(Dim dim) const;  // T
  Eigen::MatrixXd inverse(Dim dim) const;  // T⁻¹
};

Normalization normalization_for(const std::vector<BoundarySample>& samples, Dim dim);

struct ConstraintSystem {
  Dim dim = Dim::Three;
  BcKind bc = BcKind::Specular;
  Eigen::MatrixXd rows;  // acts on θ̃
  Normalization norm;
  std::size_t sample_count = 0;

  // Rows acting on θ in the original coordinates.
  Eigen::MatrixXd original_rows() const { return rows * norm.forward(dim); }
};

// Rows for one sample in the coordinates the sample is given in.
void append_rows(const BoundarySample& s, BcKind bc, Dim dim, Eigen::MatrixXd& rows,
                 Eigen::Index at);
int rows_per_sample(BcKind bc, Dim dim);

// Throws DimensionMismatch for out-of-plane samples in d=2 and
// InvalidArgument for fewer than two samples.
ConstraintSystem assemble(const std::vector<BoundarySample>& samples, BcKind bc, Dim dim);
ConstraintSystem assemble(const std::vector<BoundarySample>& samples, BcKind bc, Dim dim,
                          const Normalization& norm);

struct AdmissibleFamily {
  Dim dim = Dim::Three;
  BcKind bc = BcKind::Specular;
  double tol = 1e-7;
  Eigen::MatrixXd basis;             // columns: orthonormal θ vectors, original coordinates
  Eigen::VectorXd singular_values;   // descending, length |θ|
  int null_dim = 0;
  double gap_ratio = 0.0;            // +inf when nothing is discarded or kept
  bool gap_warning = false;          // gap_ratio < 1e3
  Normalization norm;
};

inline constexpr double kDefaultTol = 1e-7;
inline constexpr double kGapWarning = 1e3;

AdmissibleFamily nullspace(const ConstraintSystem& system, double tol = kDefaultTol);

// max over basis vectors of ‖A'b̃‖ / (‖A'‖₂ ‖b̃‖) on unseen samples, in the
// family's scaled frame. 0 when the family is empty.
double forward_check(const AdmissibleFamily& family, const std::vector<BoundarySample>& fresh);

// Same residual for a single θ (original coordinates).
double constraint_residual(const Eigen::VectorXd& theta, const std::vector<BoundarySample>& samples,
                           BcKind bc, Dim dim);

// One header line with θ labels, then one line per row (original coordinates).
void write_csv(std::ostream& os, const ConstraintSystem& system);

}  // namespace eqkit
