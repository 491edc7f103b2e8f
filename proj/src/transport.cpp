#include "eqkit/transport.hpp"

#include "eqkit/error.hpp"
#include "eqkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <variant>

namespace eqkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn(i) for i in [0, n) over contiguous chunks. The first failure by
// particle index is rethrown so errors are as deterministic as results.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_at(threads, n);
  auto work = [&](unsigned t) {
    const std::size_t lo = n * t / threads, hi = n * (t + 1) / threads;
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        error_at[t] = i;
        return;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (unsigned t = 0; t < threads; ++t) {
    if (errors[t]) std::rethrow_exception(errors[t]);
  }
}

// Roots t_lo ≤ t_hi of |p + v t|² = r²; false when the line misses.
bool sphere_roots(const Vec& p, const Vec& v, double r, double& lo, double& hi) {
  const double a = v.squaredNorm();
  if (a == 0.0) return false;
  const double b = 2.0 * p.dot(v);
  const double c = p.squaredNorm() - r * r;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return false;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) {
    lo = hi = 0.0;
    return true;
  }
  lo = q / a;
  hi = c / q;
  if (lo > hi) std::swap(lo, hi);
  return true;
}

double exit_time(const Vec& p, const Vec& v, double r) {
  double lo, hi;
  if (!sphere_roots(p, v, r, lo, hi)) return kInf;
  return std::max(hi, 0.0);
}

double scan_time(const Domain& domain, const Vec& x, const Vec& v, double horizon,
                 const SimOptions& opt) {
  const double speed = v.norm();
  if (speed == 0.0) return kInf;
  const double h = opt.scan_fraction * domain.length_scale() / speed;
  double t_prev = 0.0;
  for (std::uint64_t k = 1; t_prev < horizon; ++k) {
    const double t = std::min(static_cast<double>(k) * h, horizon);
    if (domain.g(x + t * v) > 0.0) {
      double lo = t_prev, hi = t;
      for (int it = 0; it < opt.bisection_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (domain.g(x + mid * v) > 0.0) hi = mid;
        else lo = mid;
      }
      return lo;  // last point known to be inside
    }
    t_prev = t;
  }
  return kInf;
}

struct Frame {
  Vec center = Vec::Zero();
  Vec axis = Vec::UnitZ();
  bool conserves_l = false;  // about `axis` under specular walls
};

Frame moment_frame(const Domain& domain) {
  Frame f;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball> || std::is_same_v<T, Shell>) {
          f.center = s.center;
          f.conserves_l = true;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          f.center = s.center;
        } else if constexpr (std::is_same_v<T, Torus>) {
          f.center = s.center;
          f.axis = s.axis_dir;
          f.conserves_l = true;
        } else if constexpr (std::is_same_v<T, Implicit>) {
          f.center = s.shift;
        }
      },
      domain.shape());
  if (domain.dim() == Dim::Two) f.axis = Vec::UnitZ();
  return f;
}

// Spatial part of log ρ(t, x) = log ρ0 − x·Mx − L·x.
struct LogDensity {
  double log_rho0 = 0.0;
  Mat3 M = Mat3::Zero();
  Vec L = Vec::Zero();
  double m_norm = 0.0;

  double operator()(const Vec& x) const { return log_rho0 - x.dot(M * x) - L.dot(x); }
  Vec grad(const Vec& x) const { return -2.0 * (M * x) - L; }
};

LogDensity log_density(const MaxwellianParams& p, double t) {
  const TimeWindow w = positivity_window(p);
  const FactoredForm f = factored_form(p, t);
  if (!w.contains(t) || !(f.sigma0 > 0.0)) {
    throw Error(ErrorKind::OutsidePositivityWindow, "t outside the positivity window");
  }
  const Vec z = embed_skew(p.lambda, p.dim);
  LogDensity ld;
  ld.log_rho0 = std::log(f.rho0);
  const Mat3 k = skew(z);
  ld.M = k * k / f.sigma0 + f.sigma0 * f.phi * Mat3::Identity();
  if (p.dim == Dim::Two) ld.M(2, 2) = 0.0;
  ld.L = embed(2.0 * z.cross(f.c) + f.dsigma0 * f.c + 2.0 * f.sigma0 * f.dc, p.dim);
  ld.m_norm = z.squaredNorm() / f.sigma0 + std::abs(f.sigma0 * f.phi);
  return ld;
}

struct Grid {
  int per_axis;
  Vec lo, step;
  int d;
  std::size_t count() const {
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= per_axis;
    return n;
  }
  Vec center(std::size_t idx) const {
    Vec x = Vec::Zero();
    for (int k = 0; k < d; ++k) {
      x(k) = lo(k) + (static_cast<double>(idx % per_axis) + 0.5) * step(k);
      idx /= per_axis;
    }
    return x;
  }
};

Grid make_grid(const Box& box, Dim dim, int per_axis) {
  Grid g;
  g.per_axis = per_axis;
  g.d = size(dim);
  g.lo = box.lo;
  g.step = (box.hi - box.lo) / per_axis;
  if (dim == Dim::Two) g.step(2) = 0.0;
  return g;
}

// Per-particle quantities whose means are the reported moments.
struct Quantities {
  std::vector<std::string> names;
  int second_begin = 0;
  int momentum_count = 0;
};

Quantities quantity_names(Dim dim) {
  const int d = size(dim);
  const char* pos[] = {"x", "y", "z"};
  const char* vel[] = {"vx", "vy", "vz"};
  Quantities q;
  for (int k = 0; k < d; ++k) q.names.push_back(std::string("momentum_") + pos[k]);
  q.momentum_count = d;
  q.names.push_back("energy");
  q.names.push_back("angular_momentum");
  q.second_begin = static_cast<int>(q.names.size());
  std::vector<std::string> vars;
  for (int k = 0; k < d; ++k) vars.push_back(pos[k]);
  for (int k = 0; k < d; ++k) vars.push_back(vel[k]);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i; j < vars.size(); ++j) q.names.push_back(vars[i] + "*" + vars[j]);
  }
  return q;
}

void particle_quantities(const Vec& x, const Vec& v, const Frame& f, Dim dim, double* out) {
  const int d = size(dim);
  int k = 0;
  for (int i = 0; i < d; ++i) out[k++] = v(i);
  out[k++] = 0.5 * v.squaredNorm();
  const Vec r = x - f.center;
  out[k++] = r.cross(v).dot(f.axis);
  double vars[6];
  for (int i = 0; i < d; ++i) {
    vars[i] = r(i);
    vars[d + i] = v(i);
  }
  for (int i = 0; i < 2 * d; ++i) {
    for (int j = i; j < 2 * d; ++j) out[k++] = vars[i] * vars[j];
  }
}

// Row-major table: quantity q of particle i at [q * n + i].
std::vector<double> quantity_table(const ParticleEnsemble& e, const Frame& f, std::size_t nq) {
  const std::size_t n = e.size();
  std::vector<double> table(nq * n);
  std::vector<double> row(nq);
  for (std::size_t i = 0; i < n; ++i) {
    particle_quantities(e.x[i], e.v[i], f, e.dim, row.data());
    for (std::size_t q = 0; q < nq; ++q) table[q * n + i] = row[q];
  }
  return table;
}

MomentSet moments_of(const std::vector<double>& table, const Quantities& qn, std::size_t n,
                     Dim dim) {
  MomentSet m;
  m.mass = static_cast<double>(n);
  const double inv = n ? 1.0 / static_cast<double>(n) : 0.0;
  auto mean = [&](std::size_t q) { return pairwise_sum(table.data() + q * n, n) * inv; };
  for (int k = 0; k < size(dim); ++k) m.momentum(k) = mean(k);
  m.energy = mean(qn.momentum_count);
  m.angular_momentum = mean(qn.momentum_count + 1);
  for (std::size_t q = qn.second_begin; q < qn.names.size(); ++q) m.second.push_back(mean(q));
  return m;
}

double density_z(const ParticleEnsemble& e, const Domain& domain, const MaxwellianParams& p,
                 double t) {
  const int bins = domain.dim() == Dim::Two ? 8 : 6;
  const int sub = domain.dim() == Dim::Two ? 32 : 10;
  const Box box = domain.bounding_box();
  const LogDensity ld = log_density(p, t);
  const Grid coarse = make_grid(box, domain.dim(), bins);
  const Grid fine = make_grid(box, domain.dim(), bins * sub);
  const int d = size(domain.dim());

  // Shift by the largest log value so the weights stay finite.
  std::vector<double> logs(fine.count());
  double top = -kInf;
  for (std::size_t i = 0; i < fine.count(); ++i) {
    const Vec x = fine.center(i);
    logs[i] = domain.contains(x) ? ld(x) : -kInf;
    top = std::max(top, logs[i]);
  }
  std::vector<double> mass(coarse.count(), 0.0);
  for (std::size_t i = 0; i < fine.count(); ++i) {
    if (logs[i] == -kInf) continue;
    std::size_t idx = i, cell = 0, mult = 1;
    for (int k = 0; k < d; ++k) {
      const std::size_t c = (idx % fine.per_axis) / sub;
      idx /= fine.per_axis;
      cell += c * mult;
      mult *= bins;
    }
    mass[cell] += std::exp(logs[i] - top);
  }
  const double total = pairwise_sum(mass.data(), mass.size());
  std::vector<double> counts(coarse.count(), 0.0);
  for (const Vec& x : e.x) {
    std::size_t cell = 0, mult = 1;
    for (int k = 0; k < d; ++k) {
      int c = coarse.step(k) > 0.0 ? static_cast<int>((x(k) - box.lo(k)) / coarse.step(k)) : 0;
      c = std::clamp(c, 0, bins - 1);
      cell += static_cast<std::size_t>(c) * mult;
      mult *= bins;
    }
    counts[cell] += 1.0;
  }
  const double n = static_cast<double>(e.size());
  double worst = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double pr = mass[c] / total;
    if (n * pr < 5.0 || pr >= 1.0) continue;
    worst = std::max(worst, std::abs(counts[c] - n * pr) / std::sqrt(n * pr * (1.0 - pr)));
  }
  return worst;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

double time_to_wall(const Domain& domain, const Vec& x, const Vec& v, double horizon,
                    const SimOptions& opt) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return exit_time(x - s.center, v, s.radius);
        } else if constexpr (std::is_same_v<T, Shell>) {
          const Vec p = x - s.center;
          double t = exit_time(p, v, s.r_outer);
          double lo, hi;
          if (p.dot(v) < 0.0 && sphere_roots(p, v, s.r_inner, lo, hi)) t = std::min(t, std::max(lo, 0.0));
          return t;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          Vec p = s.axes.transpose() * (x - s.center);
          Vec w = s.axes.transpose() * v;
          for (int k = 0; k < size(domain.dim()); ++k) {
            p(k) /= s.semi_axes(k);
            w(k) /= s.semi_axes(k);
          }
          if (domain.dim() == Dim::Two) p(2) = w(2) = 0.0;
          return exit_time(p, w, 1.0);
        } else {
          return scan_time(domain, x, v, horizon, opt);
        }
      },
      domain.shape());
}

ParticleEnsemble sample_initial(const MaxwellianParams& params, const Domain& domain,
                                std::size_t n, std::uint64_t seed, double t0,
                                const SimOptions& opt, SampleStats* stats) {
  if (!domain.bounded()) {
    throw Error(ErrorKind::UnboundedDomain,
                "simulation needs a bounded domain, got " + domain.kind());
  }
  if (params.dim != domain.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "params and domain dimensions differ");
  }
  params.validate();
  const LogDensity ld = log_density(params, t0);
  const FactoredForm f = factored_form(params, t0);
  const Dim dim = domain.dim();
  const int d = size(dim);
  const Box box = domain.bounding_box();

  // Upper bound of log ρ over the box: a quadratic exceeds its value at the
  // nearest grid center by at most |∇|h + |M|h².
  const Grid grid = make_grid(box, dim, d == 2 ? 64 : 24);
  const double h = 0.5 * grid.step.norm();
  double bound = -kInf;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const Vec x = grid.center(i);
    bound = std::max(bound, ld(x) + ld.grad(x).norm() * h + ld.m_norm * h * h);
  }

  const Vec z = embed_skew(params.lambda, dim);
  const double sd = std::sqrt(0.5 / f.sigma0);
  ParticleEnsemble e;
  e.dim = dim;
  e.time = t0;
  e.x.assign(n, Vec::Zero());
  e.v.assign(n, Vec::Zero());
  e.events.assign(n, 0);
  std::vector<std::uint64_t> attempts(n, 0);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    CounterRng rng(seed, i);
    for (;;) {
      if (++attempts[i] > opt.max_attempts) {
        throw Error(ErrorKind::InvalidArgument, "rejection sampling did not accept a position");
      }
      Vec x = Vec::Zero();
      for (int k = 0; k < d; ++k) x(k) = rng.uniform(box.lo(k), box.hi(k));
      const double u = rng.uniform();
      if (!domain.contains(x)) continue;
      if (!(std::log(u) < ld(x) - bound)) continue;
      const Vec mean = z.cross(x) / f.sigma0 + (f.dsigma0 / (2.0 * f.sigma0)) * x + f.c;
      Vec v = Vec::Zero();
      for (int k = 0; k < d; ++k) v(k) = mean(k) + sd * rng.normal();
      e.x[i] = x;
      e.v[i] = v;
      return;
    }
  });

  std::uint64_t total = 0;
  for (auto a : attempts) total += a;
  if (stats) {
    stats->attempts = total;
    stats->acceptance = total ? static_cast<double>(n) / static_cast<double>(total) : 1.0;
    if (stats->acceptance < opt.acceptance_warning) {
      stats->warnings.push_back("RejectionInefficiency: acceptance " +
                                std::to_string(stats->acceptance));
    }
  }
  return e;
}

ParticleEnsemble advance(const ParticleEnsemble& ens, const Domain& domain, BcKind bc,
                         double t_end, const SimOptions& opt, AdvanceStats* stats) {
  if (!(t_end >= ens.time)) {
    throw Error(ErrorKind::InvalidArgument, "t_end is before the ensemble time");
  }
  const double scale = domain.length_scale();
  const std::size_t n = ens.size();
  ParticleEnsemble out = ens;
  out.time = t_end;
  std::vector<double> speed_change(n, 0.0), offset(n, 0.0);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    Vec x = ens.x[i];
    Vec v = ens.v[i];
    std::uint64_t events = ens.events[i];
    double rem = t_end - ens.time;
    while (rem > 0.0) {
      const double tau = time_to_wall(domain, x, v, rem, opt);
      if (!(tau < rem)) {
        x += rem * v;
        break;
      }
      x += tau * v;
      rem -= tau;
      const double off = domain.boundary_distance(x) / scale;
      if (!(off <= 1e-9)) {
        throw Error(ErrorKind::EscapedParticle, "particle " + std::to_string(i) +
                                                    " left the boundary by " + std::to_string(off));
      }
      offset[i] = std::max(offset[i], off);
      const Vec nrm = domain.normal(x);
      const double s0 = v.norm();
      v = bc == BcKind::Specular ? specular_reflect(v, nrm) : bounce_back(v);
      if (s0 > 0.0) speed_change[i] = std::max(speed_change[i], std::abs(v.norm() - s0) / s0);
      if (++events - ens.events[i] > opt.max_events) {
        throw Error(ErrorKind::StuckParticle,
                    "particle " + std::to_string(i) + " exceeded the event cap");
      }
    }
    out.x[i] = x;
    out.v[i] = v;
    out.events[i] = events;
  });
  if (stats) {
    for (std::size_t i = 0; i < n; ++i) {
      stats->events += out.events[i] - ens.events[i];
      stats->max_speed_change = std::max(stats->max_speed_change, speed_change[i]);
      stats->max_event_offset = std::max(stats->max_event_offset, offset[i]);
    }
  }
  return out;
}

StationarityReport stationarity_test(const MaxwellianParams& params, const Domain& domain,
                                     BcKind bc, std::size_t n, double t_end, std::uint64_t seed,
                                     const std::vector<double>& checkpoints,
                                     const SimOptions& opt) {
  StationarityReport rep;
  rep.particles = n;
  const Frame frame = moment_frame(domain);
  rep.center = frame.center;
  rep.axis = frame.axis;
  rep.angular_momentum_conserved = frame.conserves_l && bc == BcKind::Specular;
  const Quantities qn = quantity_names(domain.dim());
  rep.second_moment_names.assign(qn.names.begin() + qn.second_begin, qn.names.end());
  const std::size_t nq = qn.names.size();

  SampleStats ss;
  const double t0 = 0.0;
  ParticleEnsemble e = sample_initial(params, domain, n, seed, t0, opt, &ss);
  rep.acceptance = ss.acceptance;
  rep.warnings = ss.warnings;

  std::vector<double> times;
  for (double t : checkpoints) {
    if (t > t0 && t < t_end) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  times.push_back(t_end);

  auto density = [&](const ParticleEnsemble& ens) {
    try {
      return density_z(ens, domain, params, ens.time);
    } catch (const Error&) {
      rep.warnings.push_back("density check skipped at t = " + std::to_string(ens.time));
      return 0.0;
    }
  };

  const std::vector<double> initial = quantity_table(e, frame, nq);
  rep.checkpoints.push_back({t0, moments_of(initial, qn, n, domain.dim()), density(e)});

  AdvanceStats as;
  for (double t : times) {
    if (t <= e.time) continue;
    e = advance(e, domain, bc, t, opt, &as);
    const std::vector<double> table = quantity_table(e, frame, nq);
    rep.checkpoints.push_back({t, moments_of(table, qn, n, domain.dim()), density(e)});
  }
  rep.events = as.events;
  rep.max_event_offset = as.max_event_offset;

  const std::vector<double> final_table = quantity_table(e, frame, nq);
  const double dn = static_cast<double>(n);
  std::vector<double> diff(n), dev(n), mag(n);
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      diff[i] = final_table[q * n + i] - initial[q * n + i];
      mag[i] = std::abs(final_table[q * n + i]) + std::abs(initial[q * n + i]);
    }
    const double mean = pairwise_sum(diff.data(), n) / dn;
    for (std::size_t i = 0; i < n; ++i) dev[i] = (diff[i] - mean) * (diff[i] - mean);
    const double var = n > 1 ? pairwise_sum(dev.data(), n) / (dn - 1.0) : 0.0;
    // Exactly conserved quantities have zero spread; floor the error at rounding.
    const double floor = 1e-12 * pairwise_sum(mag.data(), n) / dn + 1e-300;
    const double se = std::max(std::sqrt(var / dn), floor);
    const double z = mean / se;
    rep.z_scores.push_back({qn.names[q], z});
    rep.max_moment_z = std::max(rep.max_moment_z, std::abs(z));
    if (static_cast<int>(q) >= qn.second_begin) {
      rep.max_second_moment_z = std::max(rep.max_second_moment_z, std::abs(z));
    }
  }

  const std::size_t lq = qn.momentum_count + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double s0 = std::sqrt(2.0 * initial[qn.momentum_count * n + i]);
    const double s1 = std::sqrt(2.0 * final_table[qn.momentum_count * n + i]);
    if (s0 > 0.0 && std::abs(s1 - s0) / s0 > 1e-12) ++rep.speed_violations;
    if (rep.angular_momentum_conserved) {
      const double drift = std::abs(final_table[lq * n + i] - initial[lq * n + i]);
      rep.max_angular_drift = std::max(rep.max_angular_drift, drift);
      if (drift > 1e-7) ++rep.angular_violations;
    }
  }
  return rep;
}

}  // namespace eqkit
