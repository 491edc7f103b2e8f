#include "eqkit/flows.hpp"

#include "eqkit/error.hpp"

#include <cmath>

namespace eqkit {

AffineField AffineField::dilation(Dim dim, double alpha, const Vec& c) {
  AffineField f;
  f.kind = Kind::Dilation;
  f.dim = dim;
  f.alpha = alpha;
  f.c = embed(c, dim);
  return f;
}

AffineField AffineField::screw(Dim dim, const Vec& z, double beta, const Vec& c) {
  AffineField f;
  f.kind = Kind::Screw;
  f.dim = dim;
  f.z = embed_skew(z, dim);
  f.beta = beta;
  f.c = embed(c, dim);
  return f;
}

Mat3 AffineField::matrix() const {
  Mat3 m = kind == Kind::Dilation ? Mat3(alpha * Mat3::Identity())
                                  : Mat3(skew(embed_skew(z, dim)) + 0.5 * beta * Mat3::Identity());
  if (dim == Dim::Two) m(2, 2) = 0.0;
  return m;
}

namespace {

// (e^u - 1)/u, continuous at 0.
double phi1(double u) { return u == 0.0 ? 1.0 : std::expm1(u) / u; }

// Solution of x' = b x + c along a fixed line.
Vec scalar_flow(double b, const Vec& x0, const Vec& c, double t) {
  return std::exp(b * t) * x0 + (t * phi1(b * t)) * c;
}

}  // namespace

Vec closed_form_point(const AffineField& f, const Vec& x0_in, double t) {
  const Vec x0 = embed(x0_in, f.dim);
  const Vec c = embed(f.c, f.dim);
  if (f.kind == AffineField::Kind::Dilation) return scalar_flow(f.alpha, x0, c, t);

  const Vec z = embed_skew(f.z, f.dim);
  const double b = 0.5 * f.beta;
  const double w = z.norm();
  if (w == 0.0) return scalar_flow(b, x0, c, t);

  const Vec a = z / w;
  const Vec x_par = a.dot(x0) * a;
  const Vec c_par = a.dot(c) * a;
  const Vec x_perp = x0 - x_par;
  const Vec c_perp = c - c_par;

  // On the plane ⊥ z, (z∧· + b) is invertible with inverse (b w - z∧w)/(b² + |z|²).
  const double det = b * b + w * w;
  if (!(det > 1e-300) || !std::isfinite(det)) {
    throw Error(ErrorKind::SingularFieldDecomposition, "screw field has no fixed offset");
  }
  const Vec y = (b * c_perp - z.cross(c_perp)) / det;
  const Vec q = x_perp + y;
  const double th = w * t;
  const Vec rotated = std::cos(th) * q + std::sin(th) * a.cross(q);  // q ⊥ a
  Vec out = std::exp(b * t) * rotated - y + scalar_flow(b, x_par, c_par, t);
  return embed(out, f.dim);
}

FlowCurve closed_form_flow(const AffineField& f, const Vec& x0, const std::vector<double>& times) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "flow times must be strictly increasing");
    }
  }
  FlowCurve curve;
  curve.method = FlowCurve::Method::ClosedForm;
  curve.times = times;
  curve.points.reserve(times.size());
  for (double t : times) curve.points.push_back(closed_form_point(f, x0, t));
  return curve;
}

FlowCurve rk4_flow(const AffineField& f, const Vec& x0, double t_end, int steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "rk4 needs at least one step");
  FlowCurve curve;
  curve.method = FlowCurve::Method::Rk4;
  curve.times.reserve(steps + 1);
  curve.points.reserve(steps + 1);
  const Mat3 A = f.matrix();
  const Vec b = embed(f.c, f.dim);
  auto rhs = [&](const Vec& x) -> Vec { return A * x + b; };
  const double h = t_end / steps;
  Vec x = embed(x0, f.dim);
  curve.times.push_back(0.0);
  curve.points.push_back(x);
  for (int i = 1; i <= steps; ++i) {
    const Vec k1 = rhs(x);
    const Vec k2 = rhs(x + 0.5 * h * k1);
    const Vec k3 = rhs(x + 0.5 * h * k2);
    const Vec k4 = rhs(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    curve.times.push_back(h * i);
    curve.points.push_back(x);
  }
  return curve;
}

double on_surface_defect(const FlowCurve& curve, const Domain& domain) {
  const double scale = domain.length_scale();
  double worst = 0.0;
  for (const Vec& x : curve.points) worst = std::max(worst, domain.boundary_distance(x) / scale);
  return worst;
}

AffineField lie_bracket(const AffineField& f1, const AffineField& f2) {
  if (f1.dim != f2.dim) {
    throw Error(ErrorKind::DimensionMismatch, "bracket of fields of different dimension");
  }
  const Mat3 A1 = f1.matrix();
  const Mat3 A2 = f2.matrix();
  // A1A2 - A2A1 only sees the skew parts: skew(z1 ∧ z2).
  const Vec z1 = f1.kind == AffineField::Kind::Screw ? f1.z : Vec::Zero();
  const Vec z2 = f2.kind == AffineField::Kind::Screw ? f2.z : Vec::Zero();
  const Vec c = A1 * embed(f2.c, f2.dim) - A2 * embed(f1.c, f1.dim);
  return AffineField::screw(f1.dim, z1.cross(z2), 0.0, c);
}

double tangency_defect(const AffineField& f1, const AffineField& f2,
                       const std::vector<BoundarySample>& samples) {
  if (f1.dim != Dim::Three || f2.dim != Dim::Three) {
    throw Error(ErrorKind::DimensionMismatch, "tangency defect is defined for d=3");
  }
  constexpr double eps = 1e-30;
  constexpr double round = 1e-12;
  const AffineField br = lie_bracket(f1, f2);
  const double n1 = f1.matrix().norm();
  const double n2 = f2.matrix().norm();
  double worst = 0.0;
  for (const auto& s : samples) {
    const Vec F1 = f1.apply(s.x);
    const Vec F2 = f2.apply(s.x);
    const Vec B = br.apply(s.x);
    // A bracket below the rounding level of its own terms is zero.
    if (B.norm() <= round * (n1 * F2.norm() + n2 * F1.norm())) continue;
    const double num = std::abs(B.dot(F1.cross(F2)));
    const double den = (B.norm() + eps) * (F1.norm() * F2.norm() + eps);
    worst = std::max(worst, num / den);
  }
  return worst;
}

}  // namespace eqkit
