#include "eqkit/constraints.hpp"

#include "eqkit/error.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace eqkit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(BcKind bc) {
  return bc == BcKind::Specular ? "specular" : "bounce_back";
}

BcKind bc_from_string(std::string_view s) {
  if (s == "specular") return BcKind::Specular;
  if (s == "bounce_back" || s == "bounce-back") return BcKind::BounceBack;
  throw Error(ErrorKind::InvalidArgument, "unknown boundary condition '" + std::string(s) + "'");
}

std::vector<std::string> theta_labels(Dim dim) {
  std::vector<std::string> out = {"alpha", "beta"};
  if (dim == Dim::Two) {
    out.push_back("lambda");
  } else {
    out.insert(out.end(), {"lambda_x", "lambda_y", "lambda_z"});
  }
  const char* axes[] = {"x", "y", "z"};
  for (const char* block : {"w1", "w2"}) {
    for (int k = 0; k < size(dim); ++k) out.push_back(std::string(block) + "_" + axes[k]);
  }
  return out;
}

VectorXd to_theta(const MaxwellianParams& p) {
  const ThetaLayout L(p.dim);
  VectorXd th = VectorXd::Zero(L.size());
  th(L.alpha) = p.alpha;
  th(L.beta) = p.beta;
  if (p.dim == Dim::Two) {
    th(L.lambda) = p.lambda(2);
  } else {
    th.segment(L.lambda, 3) = p.lambda;
  }
  th.segment(L.w1(), L.d) = p.w1.head(L.d);
  th.segment(L.w2(), L.d) = p.w2.head(L.d);
  return th;
}

MaxwellianParams from_theta(const VectorXd& th, Dim dim, double gamma, double r0) {
  const ThetaLayout L(dim);
  if (th.size() != L.size()) {
    throw Error(ErrorKind::DimensionMismatch, "theta has length " + std::to_string(th.size()) +
                                                  ", expected " + std::to_string(L.size()));
  }
  MaxwellianParams p;
  p.dim = dim;
  p.r0 = r0;
  p.gamma = gamma;
  p.alpha = th(L.alpha);
  p.beta = th(L.beta);
  p.lambda = dim == Dim::Two ? Vec(0, 0, th(L.lambda)) : Vec(th.segment(L.lambda, 3));
  p.w1.head(L.d) = th.segment(L.w1(), L.d);
  p.w2.head(L.d) = th.segment(L.w2(), L.d);
  return p;
}

MatrixXd Normalization::forward(Dim dim) const {
  const ThetaLayout L(dim);
  const int d = L.d;
  MatrixXd T = MatrixXd::Zero(L.size(), L.size());
  T(L.alpha, L.alpha) = scale;
  T(L.beta, L.beta) = scale;
  for (int k = 0; k < L.nl; ++k) T(L.lambda + k, L.lambda + k) = scale;
  for (int k = 0; k < d; ++k) {
    T(L.w1() + k, L.w1() + k) = 1.0;
    T(L.w1() + k, L.alpha) = center(k);
    T(L.w2() + k, L.w2() + k) = 1.0;
    T(L.w2() + k, L.beta) = 0.5 * center(k);
  }
  // z ∧ c = -skew(c) z
  const Mat3 mc = -skew(center);
  if (dim == Dim::Two) {
    T(L.w2() + 0, L.lambda) = mc(0, 2);
    T(L.w2() + 1, L.lambda) = mc(1, 2);
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) T(L.w2() + i, L.lambda + j) = mc(i, j);
    }
  }
  return T;
}

MatrixXd Normalization::inverse(Dim dim) const {
  Normalization inv;
  // x̃ = (x - c)/s is itself an affine change with center -c/s and scale 1/s.
  inv.center = -center / scale;
  inv.scale = 1.0 / scale;
  return inv.forward(dim);
}

Normalization normalization_for(const std::vector<BoundarySample>& samples, Dim dim) {
  Normalization n;
  if (samples.empty()) return n;
  Vec c = Vec::Zero();
  for (const auto& s : samples) c += embed(s.x, dim);
  c /= static_cast<double>(samples.size());
  double ms = 0.0;
  for (const auto& s : samples) ms += (embed(s.x, dim) - c).squaredNorm();
  ms /= static_cast<double>(samples.size());
  n.center = c;
  n.scale = ms > 0.0 ? std::sqrt(ms) : 1.0;
  return n;
}

int rows_per_sample(BcKind bc, Dim dim) { return bc == BcKind::Specular ? 2 : 2 * size(dim); }

void append_rows(const BoundarySample& s, BcKind bc, Dim dim, MatrixXd& rows, Eigen::Index at) {
  const ThetaLayout L(dim);
  const int d = L.d;
  const Vec& x = s.x;
  const Vec& n = s.n;
  if (bc == BcKind::Specular) {
    // n·(αx + w1) = 0
    auto a = rows.row(at);
    a.setZero();
    a(L.alpha) = n.head(d).dot(x.head(d));
    a.segment(L.w1(), d) = n.head(d).transpose();
    // n·(z∧x + βx/2 + w2) = 0, with n·(z∧x) = z·(x∧n)
    auto b = rows.row(at + 1);
    b.setZero();
    b(L.beta) = 0.5 * n.head(d).dot(x.head(d));
    const Vec xn = x.cross(n);
    if (dim == Dim::Two) {
      b(L.lambda) = xn(2);
    } else {
      b.segment(L.lambda, 3) = xn.transpose();
    }
    b.segment(L.w2(), d) = n.head(d).transpose();
    return;
  }
  // αx + w1 = 0 and z∧x + βx/2 + w2 = 0, componentwise
  const Mat3 mx = -skew(x);
  for (int k = 0; k < d; ++k) {
    auto a = rows.row(at + k);
    a.setZero();
    a(L.alpha) = x(k);
    a(L.w1() + k) = 1.0;
    auto b = rows.row(at + d + k);
    b.setZero();
    b(L.beta) = 0.5 * x(k);
    if (dim == Dim::Two) {
      b(L.lambda) = mx(k, 2);
    } else {
      for (int j = 0; j < 3; ++j) b(L.lambda + j) = mx(k, j);
    }
    b(L.w2() + k) = 1.0;
  }
}

ConstraintSystem assemble(const std::vector<BoundarySample>& samples, BcKind bc, Dim dim) {
  return assemble(samples, bc, dim, normalization_for(samples, dim));
}

ConstraintSystem assemble(const std::vector<BoundarySample>& samples, BcKind bc, Dim dim,
                          const Normalization& norm) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "at least two boundary samples are required");
  }
  ConstraintSystem sys;
  sys.dim = dim;
  sys.bc = bc;
  sys.norm = norm;
  sys.sample_count = samples.size();
  const int per = rows_per_sample(bc, dim);
  const ThetaLayout L(dim);
  sys.rows.resize(static_cast<Eigen::Index>(samples.size()) * per, L.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (dim == Dim::Two && (s.x(2) != 0.0 || s.n(2) != 0.0)) {
      throw Error(ErrorKind::DimensionMismatch, "d=2 sample has a z component");
    }
    BoundarySample scaled{(s.x - norm.center) / norm.scale, s.n};
    append_rows(scaled, bc, dim, sys.rows, static_cast<Eigen::Index>(i) * per);
  }
  return sys;
}

AdmissibleFamily nullspace(const ConstraintSystem& system, double tol) {
  const ThetaLayout L(system.dim);
  const int n = L.size();
  AdmissibleFamily fam;
  fam.dim = system.dim;
  fam.bc = system.bc;
  fam.tol = tol;
  fam.norm = system.norm;

  Eigen::JacobiSVD<MatrixXd> svd(system.rows, Eigen::ComputeFullV);
  VectorXd sv = VectorXd::Zero(n);
  sv.head(svd.singularValues().size()) = svd.singularValues();
  fam.singular_values = sv;

  const double smax = sv(0);
  int rank = 0;
  while (rank < n && sv(rank) > tol * smax) ++rank;
  fam.null_dim = n - rank;

  constexpr double inf = std::numeric_limits<double>::infinity();
  if (rank == 0 || rank == n || sv(rank) == 0.0) {
    fam.gap_ratio = inf;
  } else {
    fam.gap_ratio = sv(rank - 1) / sv(rank);
  }
  fam.gap_warning = fam.gap_ratio < kGapWarning;

  if (fam.null_dim == 0) {
    fam.basis.resize(n, 0);
    return fam;
  }
  const MatrixXd scaled = svd.matrixV().rightCols(fam.null_dim);
  const MatrixXd raw = system.norm.inverse(system.dim) * scaled;
  Eigen::HouseholderQR<MatrixXd> qr(raw);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, fam.null_dim);
  for (int k = 0; k < q.cols(); ++k) {
    Eigen::Index imax = 0;
    q.col(k).cwiseAbs().maxCoeff(&imax);
    if (q(imax, k) < 0.0) q.col(k) *= -1.0;
  }
  fam.basis = q;
  return fam;
}

namespace {

double relative_residual(const MatrixXd& A, const VectorXd& b) {
  const double bn = b.norm();
  if (bn == 0.0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(A);
  const double an = svd.singularValues()(0);
  if (an == 0.0) return 0.0;
  return (A * b).norm() / (an * bn);
}

}  // namespace

double forward_check(const AdmissibleFamily& family, const std::vector<BoundarySample>& fresh) {
  if (family.null_dim == 0) return 0.0;
  const ConstraintSystem sys = assemble(fresh, family.bc, family.dim, family.norm);
  const MatrixXd T = family.norm.forward(family.dim);
  double worst = 0.0;
  for (int k = 0; k < family.basis.cols(); ++k) {
    worst = std::max(worst, relative_residual(sys.rows, T * family.basis.col(k)));
  }
  return worst;
}

double constraint_residual(const VectorXd& theta, const std::vector<BoundarySample>& samples,
                           BcKind bc, Dim dim) {
  const ConstraintSystem sys = assemble(samples, bc, dim);
  return relative_residual(sys.rows, sys.norm.forward(dim) * theta);
}

void write_csv(std::ostream& os, const ConstraintSystem& system) {
  const auto labels = theta_labels(system.dim);
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << "\n";
  const MatrixXd A = system.original_rows();
  const auto old = os.precision(17);
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) os << (c ? "," : "") << A(r, c);
    os << "\n";
  }
  os.precision(old);
}

}  // namespace eqkit
