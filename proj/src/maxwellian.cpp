#include "eqkit/maxwellian.hpp"

#include "eqkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqkit {

namespace {

bool finite(const Vec& v) { return v.allFinite(); }

double sigma0_at(const MaxwellianParams& p, double t) {
  return (p.alpha * t + p.beta) * t + p.gamma;
}

void check_dims(const MaxwellianParams& p, const Vec& x, const char* what) {
  if (p.dim == Dim::Two && x(2) != 0.0) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " has a third component but params are 2-dimensional");
  }
}

}  // namespace

void MaxwellianParams::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0)) {
    throw Error(ErrorKind::InvalidArgument, "r0 must be positive and finite");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) ||
      !finite(lambda) || !finite(w1) || !finite(w2)) {
    throw Error(ErrorKind::InvalidArgument, "Maxwellian parameters must be finite");
  }
  if (dim == Dim::Two && (w1(2) != 0.0 || w2(2) != 0.0 || lambda(0) != 0.0 || lambda(1) != 0.0)) {
    throw Error(ErrorKind::DimensionMismatch,
                "2-dimensional params carry out-of-plane components");
  }
}

MaxwellianParams MaxwellianParams::global(Dim dim, double r0, double gamma) {
  MaxwellianParams p;
  p.dim = dim;
  p.r0 = r0;
  p.gamma = gamma;
  return p;
}

TimeWindow positivity_window(const MaxwellianParams& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  TimeWindow w;
  if (!(p.gamma > 0.0)) {
    w.empty = true;
    w.lo = w.hi = 0.0;
    return w;
  }
  const double a = p.alpha, b = p.beta, c = p.gamma;
  if (a == 0.0) {
    if (b > 0.0) w.lo = -c / b;
    else if (b < 0.0) w.hi = -c / b;
    return w;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return w;  // only reachable with a > 0: σ0 > 0 everywhere
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0.0 ? 1.0 : b));
  double r1 = q / a, r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0.0) {
    if (r2 < 0.0) { w.lo = r2; w.hi = inf; }
    else { w.lo = -inf; w.hi = r1; }
  } else {
    w.lo = r1;
    w.hi = r2;
  }
  return w;
}

double eval_exponent(const MaxwellianParams& p, const EvalPoint& pt) {
  const Vec& x = pt.x;
  const Vec& v = pt.v;
  const Vec y = x - pt.t * v;
  return -p.alpha * y.squaredNorm() + p.beta * y.dot(v) - p.gamma * v.squaredNorm() +
         2.0 * p.apply_lambda(x).dot(v) - 2.0 * p.w1.dot(y) + 2.0 * p.w2.dot(v);
}

double eval(const MaxwellianParams& p, const EvalPoint& pt, const EvalOptions& opt) {
  const double e = eval_exponent(p, pt);
  if (e > opt.exponent_cap) {
    std::ostringstream os;
    os << "exponent " << e << " exceeds cap " << opt.exponent_cap;
    throw Error(ErrorKind::Overflow, os.str());
  }
  return p.r0 * std::exp(e);
}

double exponent_dt(const MaxwellianParams& p, const EvalPoint& pt) {
  const Vec y = pt.x - pt.t * pt.v;
  // E depends on t only through y = x - t v.
  const Vec de_dy = -2.0 * p.alpha * y + p.beta * pt.v - 2.0 * p.w1;
  return -de_dy.dot(pt.v);
}

Vec exponent_grad_x(const MaxwellianParams& p, const EvalPoint& pt) {
  const Vec y = pt.x - pt.t * pt.v;
  // ∇x of 2(Λ0 x)·v is 2 Λ0ᵀ v = -2 z ∧ v.
  return -2.0 * p.alpha * y + p.beta * pt.v - 2.0 * p.apply_lambda(pt.v) - 2.0 * p.w1;
}

double transport_residual(const MaxwellianParams& p, const EvalPoint& pt, const EvalOptions& opt) {
  const double m = eval(p, pt, opt);
  return m * (exponent_dt(p, pt) + pt.v.dot(exponent_grad_x(p, pt)));
}

FactoredForm factored_form(const MaxwellianParams& p, double t) {
  FactoredForm f;
  f.positivity_window = positivity_window(p);
  f.sigma0 = sigma0_at(p, t);
  f.dsigma0 = 2.0 * p.alpha * t + p.beta;
  const Vec num = t * p.w1 + p.w2;
  f.c = num / f.sigma0;
  f.dc = (p.w1 - f.dsigma0 * f.c) / f.sigma0;
  f.rho0 = p.r0 * std::exp(num.squaredNorm() / f.sigma0);
  const double b = f.dsigma0 / (2.0 * f.sigma0);
  const double db = p.alpha / f.sigma0 - f.dsigma0 * f.dsigma0 / (2.0 * f.sigma0 * f.sigma0);
  f.phi = b * b + db;
  return f;
}

namespace {

void require_window(const MaxwellianParams& p, double t) {
  const TimeWindow w = positivity_window(p);
  if (!w.contains(t) || !(sigma0_at(p, t) > 0.0)) {
    std::ostringstream os;
    os << "t = " << t << " outside the positivity window of sigma0";
    if (!w.empty) os << " (" << w.lo << ", " << w.hi << ")";
    throw Error(ErrorKind::OutsidePositivityWindow, os.str());
  }
}

// M x with M = Λ0²/σ0 + σ0 φ I.
Vec density_matrix_apply(const MaxwellianParams& p, const FactoredForm& f, const Vec& x) {
  const Vec l2x = p.apply_lambda(p.apply_lambda(x));
  return l2x / f.sigma0 + f.sigma0 * f.phi * x;
}

}  // namespace

Factorization factor(const MaxwellianParams& p, double t, const Vec& x, const EvalOptions& opt) {
  check_dims(p, x, "x");
  require_window(p, t);
  Factorization out;
  out.form = factored_form(p, t);
  const FactoredForm& f = out.form;
  out.a = f.sigma0;
  out.u = p.apply_lambda(x) / f.sigma0 + (f.dsigma0 / (2.0 * f.sigma0)) * x + f.c;

  out.rho = eval(p, EvalPoint{t, x, out.u}, opt);

  const double log_rho = std::log(f.rho0) - x.dot(density_matrix_apply(p, f, x)) -
                         2.0 * p.apply_lambda(f.c).dot(x) - f.dsigma0 * f.c.dot(x) -
                         2.0 * f.sigma0 * f.dc.dot(x);
  if (log_rho - std::log(p.r0) > opt.exponent_cap) {
    throw Error(ErrorKind::Overflow, "density exponent exceeds cap");
  }
  out.rho_explicit = std::exp(log_rho);
  return out;
}

FactorDerivatives factor_derivatives(const MaxwellianParams& p, double t, const Vec& x) {
  require_window(p, t);
  const FactoredForm f = factored_form(p, t);
  const double s0 = f.sigma0, s1 = f.dsigma0;
  const double b = s1 / (2.0 * s0);
  const double db = p.alpha / s0 - s1 * s1 / (2.0 * s0 * s0);
  const Vec z = embed_skew(p.lambda, p.dim);

  FactorDerivatives d;
  d.jac_u = skew(z) / s0 + b * Mat3::Identity();
  if (p.dim == Dim::Two) d.jac_u(2, 2) = 0.0;
  d.du_dt = -(s1 / (s0 * s0)) * z.cross(x) + db * x + f.dc;

  const Vec mx = density_matrix_apply(p, f, x);
  d.grad_log_rho = -2.0 * mx - 2.0 * z.cross(f.c) - s1 * f.c - 2.0 * s0 * f.dc;

  // d/dt of log ρ = log ρ0 - x·Mx - (2Λ0C + σ0'C + 2σ0C')·x
  const double dsig_phi = -s1 * (4.0 * p.alpha * s0 - s1 * s1) / (4.0 * s0 * s0);
  const Vec l2x = z.cross(z.cross(x));
  const double x_dm_x = -(s1 / (s0 * s0)) * x.dot(l2x) + dsig_phi * x.squaredNorm();
  const Vec dlin = 2.0 * z.cross(f.dc) - s1 * f.dc - 2.0 * p.alpha * f.c;
  d.dlog_rho_dt = s1 * f.c.squaredNorm() + 2.0 * s0 * f.c.dot(f.dc) - x_dm_x - dlin.dot(x);
  return d;
}

double PdeResiduals::max_normalized() const {
  return *std::max_element(std::begin(normalized), std::end(normalized));
}

PdeResiduals pde_system_residuals(const MaxwellianParams& p, double t, const Vec& x,
                                  const EvalOptions& opt) {
  const Factorization fz = factor(p, t, x, opt);
  const FactorDerivatives d = factor_derivatives(p, t, x);
  const FactoredForm& f = fz.form;
  const double rho = fz.rho_explicit;
  const double a = fz.a;
  const int n = size(p.dim);
  const Vec z = embed_skew(p.lambda, p.dim);
  constexpr double tiny = 1e-300;

  auto ratio = [&](double r, double s) { return std::abs(r) / (std::abs(s) + tiny); };

  PdeResiduals out;
  // (i) a = σ0(t) carries no x dependence, so ∂_{x_i} a vanishes identically.
  out.group[0] = 0.0;
  out.normalized[0] = 0.0;

  // (ii)
  for (int i = 0; i < n; ++i) {
    const double r = rho * (f.dsigma0 - 2.0 * a * d.jac_u(i, i));
    const double s = rho * (std::abs(f.dsigma0) + std::abs(2.0 * a * d.jac_u(i, i)));
    out.group[1] = std::max(out.group[1], std::abs(r));
    out.normalized[1] = std::max(out.normalized[1], ratio(r, s));
  }

  // (iii)
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = rho * a * (d.jac_u(i, j) + d.jac_u(j, i));
      const double s = rho * a * (std::abs(d.jac_u(i, j)) + std::abs(d.jac_u(j, i)));
      out.group[2] = std::max(out.group[2], std::abs(r));
      out.normalized[2] = std::max(out.normalized[2], ratio(r, s));
    }
  }

  // (iv): rounding in ∇ log ρ scales with the magnitudes of its summands.
  const Vec mx = d.jac_u * fz.u;
  const Vec res4 = 2.0 * rho * a * (mx + d.du_dt) + rho * d.grad_log_rho;
  const double l2 = z.squaredNorm();
  const double grad_scale =
      2.0 * (l2 / f.sigma0 + std::abs(f.sigma0 * f.phi)) * x.norm() +
      2.0 * z.norm() * f.c.norm() + std::abs(f.dsigma0) * f.c.norm() +
      2.0 * f.sigma0 * f.dc.norm();
  const double scale4 =
      rho * (2.0 * a * (d.jac_u.norm() * fz.u.norm() + d.du_dt.norm() +
                        (std::abs(f.dsigma0) / (f.sigma0 * f.sigma0)) * z.norm() * x.norm() +
                        f.dc.norm()) +
             grad_scale);
  out.group[3] = res4.head(n).cwiseAbs().maxCoeff();
  out.normalized[3] = ratio(out.group[3], scale4);

  // (v)
  const double res5 = rho * (d.dlog_rho_dt + fz.u.dot(d.grad_log_rho));
  const double dt_scale =
      std::abs(f.dsigma0) * f.c.squaredNorm() + 2.0 * f.sigma0 * f.c.norm() * f.dc.norm() +
      (std::abs(f.dsigma0) / (f.sigma0 * f.sigma0)) * l2 * x.squaredNorm() +
      std::abs(f.dsigma0) * (4.0 * std::abs(p.alpha) * f.sigma0 + f.dsigma0 * f.dsigma0) /
          (4.0 * f.sigma0 * f.sigma0) * x.squaredNorm() +
      (2.0 * z.norm() * f.dc.norm() + std::abs(f.dsigma0) * f.dc.norm() +
       2.0 * std::abs(p.alpha) * f.c.norm()) * x.norm();
  const double scale5 = rho * (dt_scale + fz.u.norm() * grad_scale);
  out.group[4] = std::abs(res5);
  out.normalized[4] = ratio(res5, scale5);
  return out;
}

}  // namespace eqkit
