#pragma once

// Local Maxwellians solving the free transport equation.
//
//   m(t,x,v) = r0 exp( -α|x-tv|² + β(x-tv)·v - γ|v|² + 2(Λ0 x)·v
//                      - 2 w1·(x-tv) + 2 w2·v )
//
// and the factored form m = ρ exp(-a|v-u|²) with
//   a = σ0(t) = αt² + βt + γ,
//   u = Λ0x/σ0 + (σ0'/2σ0) x + C(t),   C = (t w1 + w2)/σ0.

#include "eqkit/vec.hpp"

#include <limits>

namespace eqkit {

struct MaxwellianParams {
  Dim dim = Dim::Three;
  double r0 = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  Vec lambda = Vec::Zero();  // axis vector of Λ0; only lambda(2) is used in d=2
  Vec w1 = Vec::Zero();
  Vec w2 = Vec::Zero();

  // Throws InvalidArgument unless r0 > 0 and all entries are finite.
  void validate() const;

  // Λ0 x, with the d=2 restriction applied.
  Vec apply_lambda(const Vec& x) const { return embed_skew(lambda, dim).cross(x); }

  static MaxwellianParams global(Dim dim, double r0, double gamma);
};

struct EvalPoint {
  double t = 0.0;
  Vec x = Vec::Zero();
  Vec v = Vec::Zero();
};

// Open interval (lo, hi) on which σ0 > 0 and containing t = 0. Empty when
// γ ≤ 0.
struct TimeWindow {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool empty = false;

  bool contains(double t) const { return !empty && t > lo && t < hi; }
};

TimeWindow positivity_window(const MaxwellianParams& p);

struct EvalOptions {
  double exponent_cap = 700.0;
};

double eval_exponent(const MaxwellianParams& p, const EvalPoint& pt);

// r0 exp(E); throws Overflow when E exceeds the cap.
double eval(const MaxwellianParams& p, const EvalPoint& pt, const EvalOptions& opt = {});

// Analytic partial derivatives of the exponent.
double exponent_dt(const MaxwellianParams& p, const EvalPoint& pt);
Vec exponent_grad_x(const MaxwellianParams& p, const EvalPoint& pt);

// ∂t m + v·∇x m from the analytic derivatives.
double transport_residual(const MaxwellianParams& p, const EvalPoint& pt,
                          const EvalOptions& opt = {});

// Time-only coefficients of the factored form.
struct FactoredForm {
  double sigma0 = 0.0;     // a(t)
  double dsigma0 = 0.0;    // σ0'
  Vec c = Vec::Zero();     // C(t)
  Vec dc = Vec::Zero();    // C'(t)
  double rho0 = 0.0;       // r0 exp(|t w1 + w2|²/σ0)
  double phi = 0.0;        // (σ0'/2σ0)² + (σ0'/2σ0)'
  TimeWindow positivity_window;
};

FactoredForm factored_form(const MaxwellianParams& p, double t);

struct Factorization {
  double a = 0.0;
  Vec u = Vec::Zero();
  double rho = 0.0;           // route (i): m(t, x, u)
  double rho_explicit = 0.0;  // route (ii): closed-form density
  FactoredForm form;
};

// Throws OutsidePositivityWindow when σ0(t) ≤ 0 or t lies outside the window.
Factorization factor(const MaxwellianParams& p, double t, const Vec& x,
                     const EvalOptions& opt = {});

// Residuals of the coefficient system satisfied by (ρ, a, u):
//   (i)   ρ ∂_{x_i} a = 0
//   (ii)  ρ [u·∇a + ∂t a − 2a ∂_{x_i} u_i] = 0
//   (iii) ρ a [∂_i u_j + ∂_j u_i] = 0,  i < j
//   (iv)  2ρa ∇u_i·u + 2ρa ∂t u_i + ∂_{x_i} ρ = 0
//   (v)   ∂t ρ + u·∇ρ = 0
// Each group is reported raw and divided by the sum of magnitudes of the
// terms entering it, which is the normalized figure tests compare to 1e-8.
struct PdeResiduals {
  double group[5] = {0, 0, 0, 0, 0};       // max |residual| per group
  double normalized[5] = {0, 0, 0, 0, 0};  // max |residual| / term scale

  double max_normalized() const;
};

PdeResiduals pde_system_residuals(const MaxwellianParams& p, double t, const Vec& x,
                                  const EvalOptions& opt = {});

// Analytic derivatives of the factored coefficients, exposed for tests.
struct FactorDerivatives {
  Mat3 jac_u = Mat3::Zero();  // jac_u(i, j) = ∂_j u_i
  Vec du_dt = Vec::Zero();
  Vec grad_log_rho = Vec::Zero();
  double dlog_rho_dt = 0.0;
};

FactorDerivatives factor_derivatives(const MaxwellianParams& p, double t, const Vec& x);

}  // namespace eqkit
