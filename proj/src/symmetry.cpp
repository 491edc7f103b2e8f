#include "eqkit/symmetry.hpp"

#include "eqkit/error.hpp"

#include <cmath>

namespace eqkit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(SymmetryCase c) {
  switch (c) {
    case SymmetryCase::GlobalOnly: return "GlobalOnly";
    case SymmetryCase::HalfSpace: return "HalfSpace";
    case SymmetryCase::Slab: return "Slab";
    case SymmetryCase::DiskOrAnnulus: return "DiskOrAnnulus";
    case SymmetryCase::CylinderOfRevolution: return "CylinderOfRevolution";
    case SymmetryCase::Sphere: return "Sphere";
    case SymmetryCase::HelicalSurface: return "HelicalSurface";
    case SymmetryCase::GeneralizedCylinder: return "GeneralizedCylinder";
    case SymmetryCase::Unrecognized: return "Unrecognized";
  }
  return "Unrecognized";
}

namespace {

int numeric_rank(const MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++r;
  }
  return r;
}

Vec canonical(Vec v) {
  v.normalize();
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0.0) v = -v;
  return v + Vec::Zero();  // clears -0.0
}

struct Blocks {
  MatrixXd alpha, beta, lambda, w1, w2;  // rows of the basis, one column per vector
};

Blocks split(const AdmissibleFamily& f) {
  const ThetaLayout L(f.dim);
  const auto& B = f.basis;
  Blocks b;
  b.alpha = B.middleRows(L.alpha, 1);
  b.beta = B.middleRows(L.beta, 1);
  b.lambda = B.middleRows(L.lambda, L.nl);
  b.w1 = B.middleRows(L.w1(), L.d);
  b.w2 = B.middleRows(L.w2(), L.d);
  return b;
}

Vec lambda_vec(const VectorXd& theta, const ThetaLayout& L) {
  if (L.nl == 1) return Vec(0, 0, theta(L.lambda));
  return theta.segment(L.lambda, 3);
}

Vec w_vec(const VectorXd& theta, int at, int d) {
  Vec v = Vec::Zero();
  v.head(d) = theta.segment(at, d);
  return v;
}

// Coefficients c (|c| = 1) of the direction in the span that maximizes the
// given block: top right singular vector.
VectorXd dominant(const MatrixXd& block) {
  Eigen::JacobiSVD<MatrixXd> svd(block, Eigen::ComputeFullV);
  return svd.matrixV().col(0);
}

}  // namespace

SymmetryClass classify(const AdmissibleFamily& family) {
  SymmetryClass out;
  const ThetaLayout L(family.dim);
  const int d = L.d;
  const int k = family.null_dim;
  if (k == 0) {
    out.kind = SymmetryCase::GlobalOnly;
    return out;
  }
  const double tol = family.tol;
  const MatrixXd& B = family.basis;
  const Blocks b = split(family);

  out.flags.has_alpha_dilation = numeric_rank(b.alpha, tol) > 0;
  out.flags.has_beta_dilation = numeric_rank(b.beta, tol) > 0;
  out.flags.rotation_dims = numeric_rank(b.lambda, tol);

  // Pure translations: combinations with no α, β or Λ part.
  MatrixXd head(2 + L.nl, k);
  head << b.alpha, b.beta, b.lambda;
  Eigen::JacobiSVD<MatrixXd> hsvd(head, Eigen::ComputeFullV);
  int hrank = 0;
  for (Eigen::Index i = 0; i < hsvd.singularValues().size(); ++i) {
    if (hsvd.singularValues()(i) > tol) ++hrank;
  }
  const MatrixXd pure = hsvd.matrixV().rightCols(k - hrank);
  // A zero column keeps the SVD well-formed when there are no translations.
  MatrixXd dirs = MatrixXd::Zero(d, 2 * pure.cols() + 1);
  if (pure.cols() > 0) dirs.leftCols(2 * pure.cols()) << b.w1 * pure, b.w2 * pure;
  Eigen::JacobiSVD<MatrixXd> dsvd(dirs, Eigen::ComputeFullU);
  int tdims = 0;
  for (Eigen::Index i = 0; i < dsvd.singularValues().size(); ++i) {
    if (dsvd.singularValues()(i) > tol) ++tdims;
  }
  out.flags.translation_dims = tdims;
  auto translation_dir = [&](int i) {
    Vec v = Vec::Zero();
    v.head(d) = dsvd.matrixU().col(i);
    return v;
  };
  // Normal to the translation span (d=3: its third left singular vector).
  auto translation_normal = [&]() {
    if (d == 2) {
      const Vec t = translation_dir(0);
      return Vec(-t(1), t(0), 0.0);
    }
    return Vec(translation_dir(2));
  };

  const bool alpha = out.flags.has_alpha_dilation;
  const bool beta = out.flags.has_beta_dilation;
  const int rot = out.flags.rotation_dims;

  if (alpha) {
    out.kind = SymmetryCase::HalfSpace;
    const VectorXd theta = B * dominant(b.alpha);
    Vec n;
    if (tdims == d - 1) {
      n = translation_normal();
    } else if (rot == 1 && d == 3) {
      n = lambda_vec(B * dominant(b.lambda), L);
    } else {
      out.kind = SymmetryCase::Unrecognized;
      return out;
    }
    n = canonical(n);
    const double x0 = -w_vec(theta, L.w1(), d).dot(n) / theta(L.alpha);
    out.detected.axis_dir = n;
    out.detected.center = Vec(x0 * n);
    return out;
  }

  if (d == 2) {
    if (rot == 1 && !beta) {
      out.kind = SymmetryCase::DiskOrAnnulus;
      const VectorXd theta = B * dominant(b.lambda);
      const Vec z = lambda_vec(theta, L);
      out.detected.center = Vec(z.cross(w_vec(theta, L.w2(), d)) / z.squaredNorm());
      return out;
    }
    if (rot == 0 && !beta && tdims == 1) {
      out.kind = SymmetryCase::Slab;
      out.detected.axis_dir = canonical(translation_normal());
      return out;
    }
    return out;
  }

  if (rot == 3 && !beta && tdims == 0) {
    out.kind = SymmetryCase::Sphere;
    MatrixXd A(3 * k, 3);
    VectorXd rhs(3 * k);
    for (int j = 0; j < k; ++j) {
      const VectorXd theta = B.col(j);
      A.middleRows(3 * j, 3) = skew(lambda_vec(theta, L));
      rhs.segment(3 * j, 3) = -w_vec(theta, L.w2(), d);
    }
    out.detected.center = Vec(A.colPivHouseholderQr().solve(rhs));
    return out;
  }

  if (tdims == 2 && rot <= 1 && !beta) {
    const Vec n = canonical(translation_normal());
    if (rot == 1) {
      const Vec z = lambda_vec(B * dominant(b.lambda), L).normalized();
      if (std::abs(std::abs(z.dot(n)) - 1.0) > 1e-6) return out;
    }
    out.kind = SymmetryCase::Slab;
    out.detected.axis_dir = n;
    return out;
  }

  if (rot == 1 && !beta) {
    const VectorXd theta = B * dominant(b.lambda);
    const Vec z = lambda_vec(theta, L);
    const Vec w2 = w_vec(theta, L.w2(), d);
    const Vec a = canonical(z);
    const Vec point = z.cross(w2) / z.squaredNorm();
    if (tdims == 1) {
      if (std::abs(std::abs(translation_dir(0).dot(a)) - 1.0) > 1e-6) return out;
      out.kind = SymmetryCase::CylinderOfRevolution;
      out.detected.axis_dir = a;
      out.detected.axis_point = point;
      return out;
    }
    if (tdims == 0) {
      out.kind = SymmetryCase::HelicalSurface;
      const double p = w2.dot(z) / z.squaredNorm();
      out.detected.axis_dir = a;
      out.detected.axis_point = point;
      out.detected.pitch_p = p;
      // Coupling is judged on the unit θ: axial w2 against the noise floor.
      out.flags.helical_coupling = std::abs(w2.dot(z.normalized())) > 1e3 * tol * theta.norm();
      return out;
    }
    return out;
  }

  if (rot == 0 && !beta && tdims == 1) {
    out.kind = SymmetryCase::GeneralizedCylinder;
    out.detected.axis_dir = canonical(translation_dir(0));
    return out;
  }
  return out;
}

MaxwellianParams family_to_maxwellians(const AdmissibleFamily& family, double gamma, double r0,
                                       const std::vector<double>& coeffs) {
  if (static_cast<int>(coeffs.size()) != family.null_dim) {
    throw Error(ErrorKind::CoeffLengthMismatch,
                "expected " + std::to_string(family.null_dim) + " coefficients, got " +
                    std::to_string(coeffs.size()));
  }
  const ThetaLayout L(family.dim);
  VectorXd theta = VectorXd::Zero(L.size());
  for (int k = 0; k < family.null_dim; ++k) theta += coeffs[k] * family.basis.col(k);
  MaxwellianParams p = from_theta(theta, family.dim, gamma, r0);
  p.validate();
  return p;
}

}  // namespace eqkit
