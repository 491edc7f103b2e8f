#include "eqkit/geometry.hpp"

#include "eqkit/error.hpp"
#include "eqkit/rng.hpp"

#include <algorithm>
#include <cmath>

namespace eqkit {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

Vec unit(const Vec& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) invalid(std::string(what) + " must be a nonzero finite vector");
  return v / n;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(std::string(what) + " must be positive");
}

// In-plane frame (e1, e2) orthogonal to unit `a`, e2 = a ∧ e1.
void plane_frame(const Vec& a, const Vec& ref, Vec& e1, Vec& e2) {
  Vec r = ref - ref.dot(a) * a;
  if (r.norm() < 1e-12) {
    orthonormal_frame(a, e1, e2);
    return;
  }
  e1 = r.normalized();
  e2 = a.cross(e1);
}

// Tangent of a d=2 line with normal n.
Vec tangent2(const Vec& n) { return Vec(-n(1), n(0), 0.0); }

Vec unit_sphere_point(CounterRng& rng, Dim d) {
  const double phi = rng.uniform(0.0, kTwoPi);
  if (d == Dim::Two) return Vec(std::cos(phi), std::sin(phi), 0.0);
  const double u = rng.uniform(-1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  return Vec(s * std::cos(phi), s * std::sin(phi), u);
}

struct HelicalLocal {
  double s, xi, eta, x, y, c, sn;
};

HelicalLocal helical_local(const HelicalSurface& h, const Vec& e1, const Vec& e2, const Vec& X) {
  const Vec r = X - h.axis_point;
  HelicalLocal l;
  l.s = r.dot(h.axis_dir);
  l.xi = r.dot(e1);
  l.eta = r.dot(e2);
  const double phi = -l.s / h.pitch;
  l.c = std::cos(phi);
  l.sn = std::sin(phi);
  l.x = l.c * l.xi - l.sn * l.eta;
  l.y = l.sn * l.xi + l.c * l.eta;
  return l;
}

// Samples points on {e = 0} (a d=2 or d=3 expression) inside [lo, hi].
std::vector<Vec> sample_expression(const SurfaceExpr& e, const Vec& lo, const Vec& hi,
                                   std::size_t count, std::uint64_t seed) {
  const int n = size(e.dim());
  const double half_diag = 0.5 * (hi - lo).head(n).norm();
  const double tol = 1e-12 * std::max(1.0, half_diag);
  const double slack = 1e-9 * std::max(1.0, half_diag);
  std::vector<Vec> out;
  out.reserve(count);
  const std::size_t max_attempts = 100 * count;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt) {
    CounterRng rng(seed, attempt);
    Vec x = Vec::Zero();
    for (int k = 0; k < n; ++k) x(k) = rng.uniform(lo(k), hi(k));
    try {
      if (!project_to_surface(e, x, tol)) continue;
    } catch (const Error&) {
      continue;  // the walk hit a singular point; draw again
    }
    bool inside = true;
    for (int k = 0; k < n; ++k) inside = inside && x(k) >= lo(k) - slack && x(k) <= hi(k) + slack;
    if (inside) out.push_back(x);
  }
  if (out.size() < count) {
    throw Error(ErrorKind::ProjectionFailed,
                "only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                    " boundary points converged for '" + e.source() + "'");
  }
  return out;
}

}  // namespace

bool project_to_surface(const SurfaceExpr& e, Vec& x, double tol, int max_iter) {
  for (int it = 0; it <= max_iter; ++it) {
    const Dual d = e.eval_grad(x);
    if (std::abs(d.value) <= tol) return true;
    if (it == max_iter) break;
    const double g2 = d.grad.squaredNorm();
    if (!(g2 > 1e-24)) return false;
    x -= (d.value / g2) * d.grad;
    if (!x.allFinite()) return false;
  }
  return false;
}

Vec specular_reflect(const Vec& v, const Vec& n) { return v - 2.0 * v.dot(n) * n; }

Domain::Domain(Dim dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {
  const bool two = dim_ == Dim::Two;
  auto planar = [&](const Vec& v, const char* what) {
    if (two && v(2) != 0.0) {
      throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has a z component in d=2");
    }
  };
  auto need3 = [&](const char* what) {
    if (two) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " requires d=3");
  };
  std::visit(
      Overloaded{
          [&](HalfSpace& s) {
            planar(s.n, "normal");
            s.n = unit(s.n, "half-space normal");
            require_positive(s.extent, "extent");
          },
          [&](Slab& s) {
            planar(s.n, "normal");
            s.n = unit(s.n, "slab normal");
            if (!(s.x1 != s.x2)) invalid("slab offsets must differ");
            require_positive(s.extent, "extent");
          },
          [&](Ball& s) {
            planar(s.center, "center");
            require_positive(s.radius, "radius");
          },
          [&](Shell& s) {
            planar(s.center, "center");
            require_positive(s.r_inner, "r_inner");
            if (!(s.r_outer > s.r_inner)) invalid("r_outer must exceed r_inner");
          },
          [&](Cylinder& s) {
            need3("cylinder");
            s.axis_dir = unit(s.axis_dir, "axis_dir");
            require_positive(s.radius, "radius");
            require_positive(s.half_length, "half_length");
          },
          [&](CoaxialCylinders& s) {
            need3("coaxial_cylinders");
            s.axis_dir = unit(s.axis_dir, "axis_dir");
            require_positive(s.r_inner, "r_inner");
            if (!(s.r_outer > s.r_inner)) invalid("r_outer must exceed r_inner");
            require_positive(s.half_length, "half_length");
          },
          [&](Ellipsoid& s) {
            planar(s.center, "center");
            for (int k = 0; k < size(dim_); ++k) require_positive(s.semi_axes(k), "semi axis");
            if (two) {
              s.semi_axes(2) = 1.0;
              if (s.axes(2, 0) != 0.0 || s.axes(2, 1) != 0.0 || s.axes(0, 2) != 0.0 ||
                  s.axes(1, 2) != 0.0) {
                throw Error(ErrorKind::DimensionMismatch, "ellipse axes leave the plane");
              }
            }
            if ((s.axes.transpose() * s.axes - Mat3::Identity()).norm() > 1e-9) {
              invalid("ellipsoid axes must be orthonormal");
            }
          },
          [&](Torus& s) {
            need3("torus");
            s.axis_dir = unit(s.axis_dir, "axis_dir");
            require_positive(s.minor_r, "minor_r");
            if (!(s.major_r > s.minor_r)) invalid("major_r must exceed minor_r");
          },
          [&](HelicalSurface& s) {
            need3("helical");
            s.axis_dir = unit(s.axis_dir, "axis_dir");
            if (!(s.pitch != 0.0) || !std::isfinite(s.pitch)) invalid("helical pitch must be nonzero");
            if (s.profile.empty() || s.profile.dim() != Dim::Two) {
              invalid("helical profile must be a 2-variable expression");
            }
            require_positive(s.half_length, "half_length");
          },
          [&](GeneralizedCylinder& s) {
            need3("generalized_cylinder");
            s.direction = unit(s.direction, "direction");
            if (s.cross_section.empty() || s.cross_section.dim() != Dim::Two) {
              invalid("cross_section must be a 2-variable expression");
            }
            require_positive(s.half_length, "half_length");
          },
          [&](Implicit& s) {
            if (s.expr.empty() || s.expr.dim() != dim_) {
              throw Error(ErrorKind::DimensionMismatch, "implicit expression dimension mismatch");
            }
            for (int k = 0; k < size(dim_); ++k) {
              if (!(s.hi(k) > s.lo(k))) invalid("implicit bbox must be nonempty");
            }
          },
      },
      shape_);
}

std::string Domain::kind() const {
  return std::visit(Overloaded{
                        [](const HalfSpace&) { return "half_space"; },
                        [](const Slab&) { return "slab"; },
                        [](const Ball&) { return "ball"; },
                        [](const Shell&) { return "annulus"; },
                        [](const Cylinder&) { return "cylinder"; },
                        [](const CoaxialCylinders&) { return "coaxial_cylinders"; },
                        [](const Ellipsoid&) { return "ellipsoid"; },
                        [](const Torus&) { return "torus"; },
                        [](const HelicalSurface&) { return "helical"; },
                        [](const GeneralizedCylinder&) { return "generalized_cylinder"; },
                        [](const Implicit&) { return "implicit"; },
                    },
                    shape_);
}

bool Domain::bounded() const {
  return std::holds_alternative<Ball>(shape_) || std::holds_alternative<Shell>(shape_) ||
         std::holds_alternative<Ellipsoid>(shape_) || std::holds_alternative<Torus>(shape_) ||
         std::holds_alternative<Implicit>(shape_);
}

Dual Domain::g_grad(const Vec& X) const {
  const Vec x = embed(X, dim_);
  Dual out = std::visit(
      Overloaded{
          [&](const HalfSpace& s) { return Dual{x.dot(s.n) - s.x0, s.n}; },
          [&](const Slab& s) {
            const double lo = std::min(s.x1, s.x2), hi = std::max(s.x1, s.x2);
            const double t = x.dot(s.n);
            return Dual{(t - lo) * (t - hi), (2.0 * t - lo - hi) * s.n};
          },
          [&](const Ball& s) {
            const Vec r = x - s.center;
            const double n = r.norm();
            return Dual{n - s.radius, n > 0.0 ? Vec(r / n) : Vec(Vec::Zero())};
          },
          [&](const Shell& s) {
            const Vec r = x - s.center;
            const double n = r.norm();
            const Vec e = n > 0.0 ? Vec(r / n) : Vec(Vec::Zero());
            if (s.r_inner - n > n - s.r_outer) return Dual{s.r_inner - n, -e};
            return Dual{n - s.r_outer, e};
          },
          [&](const Cylinder& s) {
            const Vec r = x - s.axis_point;
            const Vec perp = r - r.dot(s.axis_dir) * s.axis_dir;
            const double n = perp.norm();
            return Dual{n - s.radius, n > 0.0 ? Vec(perp / n) : Vec(Vec::Zero())};
          },
          [&](const CoaxialCylinders& s) {
            const Vec r = x - s.axis_point;
            const Vec perp = r - r.dot(s.axis_dir) * s.axis_dir;
            const double n = perp.norm();
            const Vec e = n > 0.0 ? Vec(perp / n) : Vec(Vec::Zero());
            if (s.r_inner - n > n - s.r_outer) return Dual{s.r_inner - n, -e};
            return Dual{n - s.r_outer, e};
          },
          [&](const Ellipsoid& s) {
            const Vec q = s.axes.transpose() * (x - s.center);
            Dual d{-1.0, Vec::Zero()};
            Vec gq = Vec::Zero();
            for (int k = 0; k < size(dim_); ++k) {
              const double a2 = s.semi_axes(k) * s.semi_axes(k);
              d.value += q(k) * q(k) / a2;
              gq(k) = 2.0 * q(k) / a2;
            }
            d.grad = s.axes * gq;
            return d;
          },
          [&](const Torus& s) {
            const Vec r = x - s.center;
            const double h = r.dot(s.axis_dir);
            const Vec perp = r - h * s.axis_dir;
            const double rho = perp.norm();
            const Vec e = rho > 0.0 ? Vec(perp / rho) : Vec(Vec::Zero());
            const Vec q = (rho - s.major_r) * e + h * s.axis_dir;
            const double n = q.norm();
            return Dual{n - s.minor_r, n > 0.0 ? Vec(q / n) : Vec(Vec::Zero())};
          },
          [&](const HelicalSurface& s) {
            Vec e1, e2;
            plane_frame(s.axis_dir, s.ref_dir, e1, e2);
            const HelicalLocal l = helical_local(s, e1, e2, x);
            const Dual p = s.profile.eval_grad(Vec(l.x, l.y, 0.0));
            const Vec dx = l.c * e1 - l.sn * e2 + (l.y / s.pitch) * s.axis_dir;
            const Vec dy = l.sn * e1 + l.c * e2 - (l.x / s.pitch) * s.axis_dir;
            return Dual{p.value, p.grad(0) * dx + p.grad(1) * dy};
          },
          [&](const GeneralizedCylinder& s) {
            Vec e1, e2;
            plane_frame(s.direction, s.ref_dir, e1, e2);
            const Vec r = x - s.point;
            const Dual p = s.cross_section.eval_grad(Vec(r.dot(e1), r.dot(e2), 0.0));
            return Dual{p.value, p.grad(0) * e1 + p.grad(1) * e2};
          },
          [&](const Implicit& s) {
            const Dual p = s.expr.eval_grad(s.rot.transpose() * (x - s.shift));
            return Dual{p.value, s.rot * p.grad};
          },
      },
      shape_);
  if (dim_ == Dim::Two) out.grad(2) = 0.0;
  return out;
}

double Domain::g(const Vec& x) const {
  if (const auto* s = std::get_if<Implicit>(&shape_)) {
    return s->expr.eval(s->rot.transpose() * (embed(x, dim_) - s->shift));
  }
  return g_grad(x).value;
}

Vec Domain::normal(const Vec& x) const {
  const Dual d = g_grad(x);
  const double n = d.grad.norm();
  if (!(n >= 1e-12)) {
    throw Error(ErrorKind::DegenerateGradient, "degenerate gradient at " + format_vec(x, dim_));
  }
  return d.grad / n;
}

double Domain::boundary_distance(const Vec& x) const {
  const Dual d = g_grad(x);
  const double n = d.grad.norm();
  if (!(n > 0.0)) return std::abs(d.value) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::abs(d.value) / n;
}

double Domain::length_scale() const {
  return std::visit(
      Overloaded{
          [](const HalfSpace& s) { return s.extent; },
          [](const Slab& s) { return std::max(s.extent, std::abs(s.x2 - s.x1)); },
          [](const Ball& s) { return s.radius; },
          [](const Shell& s) { return s.r_outer; },
          [](const Cylinder& s) { return std::max(s.radius, s.half_length); },
          [](const CoaxialCylinders& s) { return std::max(s.r_outer, s.half_length); },
          [&](const Ellipsoid& s) { return s.semi_axes.head(size(dim_)).maxCoeff(); },
          [](const Torus& s) { return s.major_r + s.minor_r; },
          [](const HelicalSurface& s) {
            return std::max(0.5 * (s.profile_hi - s.profile_lo).head(2).norm(), s.half_length);
          },
          [](const GeneralizedCylinder& s) {
            return std::max(0.5 * (s.section_hi - s.section_lo).head(2).norm(), s.half_length);
          },
          [&](const Implicit& s) { return 0.5 * (s.hi - s.lo).head(size(dim_)).norm(); },
      },
      shape_);
}

Box Domain::bounding_box() const {
  const Vec inf = Vec::Constant(std::numeric_limits<double>::infinity());
  Box b = std::visit(
      Overloaded{
          [](const Ball& s) { return Box{s.center.array() - s.radius, s.center.array() + s.radius}; },
          [](const Shell& s) {
            return Box{s.center.array() - s.r_outer, s.center.array() + s.r_outer};
          },
          [&](const Ellipsoid& s) {
            Vec half;
            for (int i = 0; i < 3; ++i) {
              double acc = 0.0;
              for (int j = 0; j < size(dim_); ++j) {
                const double t = s.axes(i, j) * s.semi_axes(j);
                acc += t * t;
              }
              half(i) = std::sqrt(acc);
            }
            return Box{s.center - half, s.center + half};
          },
          [](const Torus& s) {
            Vec half;
            for (int i = 0; i < 3; ++i) {
              const double a = s.axis_dir(i);
              half(i) = s.major_r * std::sqrt(std::max(0.0, 1.0 - a * a)) + s.minor_r;
            }
            return Box{s.center - half, s.center + half};
          },
          [&](const Implicit& s) {
            Box out{inf, -inf};
            for (int corner = 0; corner < 8; ++corner) {
              Vec c;
              for (int k = 0; k < 3; ++k) c(k) = (corner >> k) & 1 ? s.hi(k) : s.lo(k);
              if (dim_ == Dim::Two) c(2) = 0.0;
              const Vec w = s.rot * c + s.shift;
              out.lo = out.lo.cwiseMin(w);
              out.hi = out.hi.cwiseMax(w);
            }
            return out;
          },
          [&](const auto&) { return Box{-inf, inf}; },
      },
      shape_);
  if (dim_ == Dim::Two) b.lo(2) = b.hi(2) = 0.0;
  return b;
}

std::vector<BoundarySample> Domain::sample_boundary(std::size_t count, std::uint64_t seed) const {
  if (count < 1) invalid("sample count must be at least 1");
  const bool two = dim_ == Dim::Two;
  const double rd = two ? 1.0 : 2.0;  // exponent for area weighting of concentric pieces
  std::vector<BoundarySample> out(count);

  auto patch = [&](CounterRng& rng, const Vec& n, double extent) {
    if (two) return Vec(rng.uniform(-extent, extent) * tangent2(n));
    Vec e1, e2;
    orthonormal_frame(n, e1, e2);
    return Vec(rng.uniform(-extent, extent) * e1 + rng.uniform(-extent, extent) * e2);
  };

  auto expression_points = [&](const SurfaceExpr& e, const Vec& lo, const Vec& hi) {
    return sample_expression(e, lo, hi, count, seed);
  };

  std::visit(
      Overloaded{
          [&](const HalfSpace& s) {
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              out[i].x = s.x0 * s.n + patch(rng, s.n, s.extent);
              out[i].n = s.n;
            }
          },
          [&](const Slab& s) {
            const double lo = std::min(s.x1, s.x2), hi = std::max(s.x1, s.x2);
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const bool upper = rng.uniform() < 0.5;
              out[i].x = (upper ? hi : lo) * s.n + patch(rng, s.n, s.extent);
              out[i].n = upper ? s.n : Vec(-s.n);
            }
          },
          [&](const Ball& s) {
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const Vec u = unit_sphere_point(rng, dim_);
              out[i].x = s.center + s.radius * u;
              out[i].n = u;
            }
          },
          [&](const Shell& s) {
            const double wi = std::pow(s.r_inner, rd);
            const double p_inner = wi / (wi + std::pow(s.r_outer, rd));
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const bool inner = rng.uniform() < p_inner;
              const Vec u = unit_sphere_point(rng, dim_);
              out[i].x = s.center + (inner ? s.r_inner : s.r_outer) * u;
              out[i].n = inner ? Vec(-u) : u;
            }
          },
          [&](const Cylinder& s) {
            Vec e1, e2;
            orthonormal_frame(s.axis_dir, e1, e2);
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const double phi = rng.uniform(0.0, kTwoPi);
              const double h = rng.uniform(-s.half_length, s.half_length);
              const Vec u = std::cos(phi) * e1 + std::sin(phi) * e2;
              out[i].x = s.axis_point + h * s.axis_dir + s.radius * u;
              out[i].n = u;
            }
          },
          [&](const CoaxialCylinders& s) {
            Vec e1, e2;
            orthonormal_frame(s.axis_dir, e1, e2);
            const double p_inner = s.r_inner / (s.r_inner + s.r_outer);
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const bool inner = rng.uniform() < p_inner;
              const double phi = rng.uniform(0.0, kTwoPi);
              const double h = rng.uniform(-s.half_length, s.half_length);
              const Vec u = std::cos(phi) * e1 + std::sin(phi) * e2;
              out[i].x = s.axis_point + h * s.axis_dir + (inner ? s.r_inner : s.r_outer) * u;
              out[i].n = inner ? Vec(-u) : u;
            }
          },
          [&](const Ellipsoid& s) {
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const Vec u = unit_sphere_point(rng, dim_);
              Vec q = Vec::Zero(), gq = Vec::Zero();
              for (int k = 0; k < size(dim_); ++k) {
                q(k) = s.semi_axes(k) * u(k);
                gq(k) = u(k) / s.semi_axes(k);
              }
              out[i].x = s.center + s.axes * q;
              out[i].n = (s.axes * gq).normalized();
            }
          },
          [&](const Torus& s) {
            Vec e1, e2;
            orthonormal_frame(s.axis_dir, e1, e2);
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed, i);
              const double u = rng.uniform(0.0, kTwoPi);
              const double v = rng.uniform(0.0, kTwoPi);
              const Vec radial = std::cos(u) * e1 + std::sin(u) * e2;
              const Vec n = std::cos(v) * radial + std::sin(v) * s.axis_dir;
              out[i].x = s.center + s.major_r * radial + s.minor_r * n;
              out[i].n = n;
            }
          },
          [&](const HelicalSurface& s) {
            Vec e1, e2;
            plane_frame(s.axis_dir, s.ref_dir, e1, e2);
            const auto pts = expression_points(s.profile, s.profile_lo, s.profile_hi);
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed ^ 0x5bd1e995ULL, i);
              const double h = rng.uniform(-s.half_length, s.half_length);
              const double a = h / s.pitch;  // undo the co-rotation
              const double xi = std::cos(a) * pts[i](0) - std::sin(a) * pts[i](1);
              const double eta = std::sin(a) * pts[i](0) + std::cos(a) * pts[i](1);
              out[i].x = s.axis_point + xi * e1 + eta * e2 + h * s.axis_dir;
              out[i].n = normal(out[i].x);
            }
          },
          [&](const GeneralizedCylinder& s) {
            Vec e1, e2;
            plane_frame(s.direction, s.ref_dir, e1, e2);
            const auto pts = expression_points(s.cross_section, s.section_lo, s.section_hi);
            for (std::size_t i = 0; i < count; ++i) {
              CounterRng rng(seed ^ 0x5bd1e995ULL, i);
              const double h = rng.uniform(-s.half_length, s.half_length);
              out[i].x = s.point + pts[i](0) * e1 + pts[i](1) * e2 + h * s.direction;
              out[i].n = normal(out[i].x);
            }
          },
          [&](const Implicit& s) {
            const auto pts = expression_points(s.expr, s.lo, s.hi);
            for (std::size_t i = 0; i < count; ++i) {
              out[i].x = embed(s.rot * pts[i] + s.shift, dim_);
              out[i].n = normal(out[i].x);
            }
          },
      },
      shape_);
  return out;
}

Domain Domain::transformed(const Mat3& rot, const Vec& shift) const {
  if (dim_ == Dim::Two && (std::abs(rot(2, 2) - 1.0) > 1e-12 || shift(2) != 0.0)) {
    throw Error(ErrorKind::DimensionMismatch, "d=2 motions must keep the plane");
  }
  auto pt = [&](const Vec& p) { return Vec(embed(rot * p + shift, dim_)); };
  auto dir = [&](const Vec& d) { return Vec(embed(rot * d, dim_)); };
  Shape moved = std::visit(
      Overloaded{
          [&](HalfSpace s) -> Shape {
            s.n = dir(s.n);
            s.x0 += s.n.dot(shift);
            return s;
          },
          [&](Slab s) -> Shape {
            s.n = dir(s.n);
            s.x1 += s.n.dot(shift);
            s.x2 += s.n.dot(shift);
            return s;
          },
          [&](Ball s) -> Shape {
            s.center = pt(s.center);
            return s;
          },
          [&](Shell s) -> Shape {
            s.center = pt(s.center);
            return s;
          },
          [&](Cylinder s) -> Shape {
            s.axis_point = pt(s.axis_point);
            s.axis_dir = dir(s.axis_dir);
            return s;
          },
          [&](CoaxialCylinders s) -> Shape {
            s.axis_point = pt(s.axis_point);
            s.axis_dir = dir(s.axis_dir);
            return s;
          },
          [&](Ellipsoid s) -> Shape {
            s.center = pt(s.center);
            s.axes = rot * s.axes;
            return s;
          },
          [&](Torus s) -> Shape {
            s.center = pt(s.center);
            s.axis_dir = dir(s.axis_dir);
            return s;
          },
          [&](HelicalSurface s) -> Shape {
            Vec e1, e2;
            plane_frame(s.axis_dir, s.ref_dir, e1, e2);
            s.axis_point = pt(s.axis_point);
            s.axis_dir = dir(s.axis_dir);
            s.ref_dir = dir(e1);
            return s;
          },
          [&](GeneralizedCylinder s) -> Shape {
            Vec e1, e2;
            plane_frame(s.direction, s.ref_dir, e1, e2);
            s.point = pt(s.point);
            s.direction = dir(s.direction);
            s.ref_dir = dir(e1);
            return s;
          },
          [&](Implicit s) -> Shape {
            s.rot = rot * s.rot;
            s.shift = rot * s.shift + shift;
            return s;
          },
      },
      shape_);
  return Domain(dim_, std::move(moved));
}

}  // namespace eqkit
