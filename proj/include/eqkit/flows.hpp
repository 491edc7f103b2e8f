#pragma once

// Affine symmetry generators and their flows.
//
//   dilation: x' = αx + c
//   screw:    x' = z∧x + (β/2)x + c
//
// Both are x' = A x + b; the bracket of two such fields is again affine with
// a skew matrix part, so it is returned as a screw with β = 0.

#include "eqkit/geometry.hpp"
#include "eqkit/vec.hpp"

#include <vector>

namespace eqkit {

struct AffineField {
  enum class Kind { Dilation, Screw };

  Kind kind = Kind::Screw;
  Dim dim = Dim::Three;
  double alpha = 0.0;      // dilation rate
  Vec z = Vec::Zero();     // screw axis vector (only z(2) in d=2)
  double beta = 0.0;       // screw dilation, enters as β/2
  Vec c = Vec::Zero();

  static AffineField dilation(Dim dim, double alpha, const Vec& c);
  static AffineField screw(Dim dim, const Vec& z, double beta, const Vec& c);

  Mat3 matrix() const;
  Vec apply(const Vec& x) const { return matrix() * x + embed(c, dim); }
};

struct FlowCurve {
  enum class Method { ClosedForm, Rk4 };

  std::vector<double> times;
  std::vector<Vec> points;
  Method method = Method::ClosedForm;
};

// Point of the exact flow at time t. Throws SingularFieldDecomposition when
// the screw part cannot be split into rotation and fixed offset.
Vec closed_form_point(const AffineField& f, const Vec& x0, double t);

// times must be strictly increasing.
FlowCurve closed_form_flow(const AffineField& f, const Vec& x0, const std::vector<double>& times);

// Classical RK4 from t = 0 with `steps` equal steps; steps + 1 points.
FlowCurve rk4_flow(const AffineField& f, const Vec& x0, double t_end, int steps);

// max over the curve of |g|/|∇g| divided by the domain length scale.
double on_surface_defect(const FlowCurve& curve, const Domain& domain);

// [F1, F2] = DF1·F2 − DF2·F1, the convention under which the two-axis
// example expands to (ρ sinθ − (λ+p) cosθ, z cosθ, −y cosθ).
AffineField lie_bracket(const AffineField& f1, const AffineField& f2);

// max over samples of |[F1,F2]·(F1∧F2)| / ((|[F1,F2]|+ε)(|F1||F2|+ε)).
// ε = 1e-30. A bracket smaller than 1e-12 times its own terms (|A1||F2| +
// |A2||F1|) is rounding noise and counts as zero.
double tangency_defect(const AffineField& f1, const AffineField& f2,
                       const std::vector<BoundarySample>& samples);

}  // namespace eqkit
