#include "eqkit/run.hpp"

#include "eqkit/error.hpp"
#include "eqkit/rng.hpp"
#include "eqkit/symmetry.hpp"
#include "eqkit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef EQKIT_VERSION
#define EQKIT_VERSION "0.0.0"
#endif

namespace eqkit {

namespace {

// Non-finite values have no JSON spelling; they are written as null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec_json(const Vec& v, Dim dim) {
  Json a = Json::array();
  for (int k = 0; k < size(dim); ++k) a.push_back(num(v(k)));
  return a;
}

Json eigen_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(num(v(k)));
  return a;
}

Json opt_vec(const std::optional<Vec>& v, Dim dim) {
  return v ? vec_json(*v, dim) : Json(nullptr);
}

Json config_echo(const RunConfig& c) {
  Json j;
  j["command"] = std::string(to_string(c.command));
  j["domain_file"] = c.domain_file;
  j["params_file"] = c.params_file;
  j["field_file"] = c.field_file;
  j["bc"] = std::string(to_string(c.bc));
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  switch (c.command) {
    case Command::Trace:
      j["x0"] = vec_json(c.x0, Dim::Three);
      j["t_end"] = c.t_end;
      j["steps"] = c.steps;
      j["method"] = c.method;
      break;
    case Command::Simulate: {
      j["particles"] = c.particles;
      j["t_end"] = c.t_end;
      Json cps = Json::array();
      for (double t : c.checkpoints) cps.push_back(t);
      j["checkpoints"] = cps;
      break;
    }
    case Command::Factor:
      j["t"] = c.t;
      j["x"] = vec_json(c.x, Dim::Three);
      break;
    default: break;
  }
  return j;
}

Json header(const RunConfig& c) {
  Json j;
  j["tool"] = "eqkit";
  j["tool_version"] = tool_version();
  j["command"] = std::string(to_string(c.command));
  j["config"] = config_echo(c);
  return j;
}

// Fresh samples for forward checks come from an independent stream.
std::uint64_t fresh_seed(std::uint64_t seed) { return mix64(seed ^ 0x9e3779b97f4a7c15ULL); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, path + ": cannot write file");
  out << text;
}

Json run_classify(const RunConfig& c) {
  const Domain domain = load_domain(c.domain_file);
  const Dim dim = domain.dim();
  const auto samples = domain.sample_boundary(c.samples, c.seed);
  const ConstraintSystem sys = assemble(samples, c.bc, dim);
  if (!c.dump_matrix.empty()) {
    std::ostringstream os;
    write_csv(os, sys);
    write_text(c.dump_matrix, os.str());
  }
  const AdmissibleFamily fam = nullspace(sys, c.tol);
  const SymmetryClass cls = classify(fam);
  const auto fresh = domain.sample_boundary(c.samples, fresh_seed(c.seed));
  const double fwd = forward_check(fam, fresh);

  Json j = header(c);
  j["domain_kind"] = domain.kind();
  j["dim"] = size(dim);
  Json labels = Json::array();
  for (const auto& l : theta_labels(dim)) labels.push_back(l);
  j["theta_labels"] = labels;
  j["singular_values"] = eigen_json(fam.singular_values);
  j["null_dim"] = fam.null_dim;
  j["gap_ratio"] = num(fam.gap_ratio);
  j["gap_warning"] = fam.gap_warning;
  Json basis = Json::array();
  for (Eigen::Index k = 0; k < fam.basis.cols(); ++k) basis.push_back(eigen_json(fam.basis.col(k)));
  j["basis"] = basis;

  Json det;
  det["axis_point"] = opt_vec(cls.detected.axis_point, dim);
  det["axis_dir"] = opt_vec(cls.detected.axis_dir, dim);
  det["center"] = opt_vec(cls.detected.center, dim);
  det["pitch_p"] = cls.detected.pitch_p ? num(*cls.detected.pitch_p) : Json(nullptr);
  Json flags;
  flags["has_alpha_dilation"] = cls.flags.has_alpha_dilation;
  flags["has_beta_dilation"] = cls.flags.has_beta_dilation;
  flags["rotation_dims"] = cls.flags.rotation_dims;
  flags["translation_dims"] = cls.flags.translation_dims;
  flags["helical_coupling"] = cls.flags.helical_coupling;
  Json cj;
  cj["case"] = std::string(to_string(cls.kind));
  cj["detected"] = det;
  cj["flags"] = flags;
  j["classification"] = cj;

  Json fj;
  fj["residual"] = num(fwd);
  fj["samples"] = fresh.size();
  fj["passed"] = fwd <= 10.0 * c.tol;
  j["forward_check"] = fj;
  return j;
}

struct TransportStats {
  double max_normalized = 0.0;
  double mean_normalized = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;
};

// ∂t m + v·∇m at seeded random points, each divided by m(|∂t E| + |v||∇E|).
TransportStats transport_stats(const MaxwellianParams& p, double scale, std::size_t n,
                               std::uint64_t seed) {
  const TimeWindow w = positivity_window(p);
  double lo = std::max(-1.0, w.empty ? -1.0 : w.lo);
  double hi = std::min(1.0, w.empty ? 1.0 : w.hi);
  const double mid = 0.5 * (lo + hi);
  lo = mid + 0.9 * (lo - mid);
  hi = mid + 0.9 * (hi - mid);
  const int d = size(p.dim);
  const double vs = p.gamma > 0.0 ? 1.0 / std::sqrt(2.0 * p.gamma) : 1.0;
  TransportStats s;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    EvalPoint pt;
    pt.t = rng.uniform(lo, hi);
    for (int k = 0; k < d; ++k) pt.x(k) = rng.uniform(-scale, scale);
    for (int k = 0; k < d; ++k) pt.v(k) = vs * rng.normal();
    double r = 0.0;
    double m = 0.0;
    try {
      r = transport_residual(p, pt);
      m = eval(p, pt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Overflow) throw;
      ++s.skipped;
      continue;
    }
    const double termscale =
        m * (std::abs(exponent_dt(p, pt)) + pt.v.norm() * exponent_grad_x(p, pt).norm());
    const double q = termscale > 0.0 ? std::abs(r) / termscale : 0.0;
    s.max_normalized = std::max(s.max_normalized, q);
    sum += q;
    ++s.points;
  }
  s.mean_normalized = s.points ? sum / static_cast<double>(s.points) : 0.0;
  return s;
}

constexpr double kTransportTol = 1e-8;

Json run_verify(const RunConfig& c, int& exit_code) {
  const Domain domain = load_domain(c.domain_file);
  const MaxwellianParams p = load_params(c.params_file);
  if (p.dim != domain.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "params and domain have different dimensions");
  }
  const Dim dim = domain.dim();
  const TransportStats ts = transport_stats(p, domain.length_scale(), c.samples, c.seed);

  const auto samples = domain.sample_boundary(c.samples, c.seed);
  const ConstraintSystem sys = assemble(samples, c.bc, dim);
  const Eigen::VectorXd theta = to_theta(p);
  const Eigen::VectorXd rows = sys.original_rows() * theta;
  const double rel = constraint_residual(theta, samples, c.bc, dim);

  const bool transport_ok = ts.max_normalized <= kTransportTol;
  const bool boundary_ok = rel <= c.tol;
  const bool admissible = transport_ok && boundary_ok;

  Json j = header(c);
  j["domain_kind"] = domain.kind();
  j["dim"] = size(dim);
  j["theta"] = eigen_json(theta);
  Json tj;
  tj["points"] = ts.points;
  tj["skipped_overflow"] = ts.skipped;
  tj["max_normalized_residual"] = num(ts.max_normalized);
  tj["mean_normalized_residual"] = num(ts.mean_normalized);
  tj["threshold"] = kTransportTol;
  tj["passed"] = transport_ok;
  j["transport"] = tj;
  Json bj;
  bj["samples"] = samples.size();
  bj["relative_residual"] = num(rel);
  bj["max_abs_row"] = num(rows.size() ? rows.cwiseAbs().maxCoeff() : 0.0);
  bj["rms_row"] = num(rows.size() ? rows.norm() / std::sqrt(double(rows.size())) : 0.0);
  bj["threshold"] = c.tol;
  bj["passed"] = boundary_ok;
  j["boundary"] = bj;
  j["admissible"] = admissible;
  exit_code = admissible ? 0 : 2;
  return j;
}

std::string trace_csv(const FlowCurve& curve, Dim dim) {
  std::ostringstream os;
  os.precision(17);
  os << (dim == Dim::Two ? "t,x,y\n" : "t,x,y,z\n");
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    os << curve.times[i];
    for (int k = 0; k < size(dim); ++k) os << ',' << curve.points[i](k);
    os << '\n';
  }
  return os.str();
}

Json run_trace(const RunConfig& c, std::string& csv) {
  const AffineField f = load_field(c.field_file);
  if (f.dim == Dim::Two && c.x0(2) != 0.0) {
    throw Error(ErrorKind::DimensionMismatch, "x0 has a third component in d=2");
  }
  FlowCurve curve;
  if (c.method == "rk4") {
    curve = rk4_flow(f, c.x0, c.t_end, c.steps);
  } else {
    std::vector<double> times(static_cast<std::size_t>(c.steps) + 1);
    for (int i = 0; i <= c.steps; ++i) times[i] = c.t_end * i / c.steps;
    if (c.t_end == 0.0) times.assign(1, 0.0);
    curve = closed_form_flow(f, c.x0, times);
  }
  csv = trace_csv(curve, f.dim);

  Json j = header(c);
  j["dim"] = size(f.dim);
  j["points"] = curve.points.size();
  j["final_point"] = vec_json(curve.points.back(), f.dim);
  if (!c.domain_file.empty()) {
    const Domain domain = load_domain(c.domain_file);
    j["on_surface_defect"] = num(on_surface_defect(curve, domain));
  }
  return j;
}

Json moments_json(const MomentSet& m, const std::vector<std::string>& names, Dim dim) {
  Json j;
  j["mass"] = m.mass;
  j["momentum"] = vec_json(m.momentum, dim);
  j["energy"] = num(m.energy);
  j["angular_momentum"] = num(m.angular_momentum);
  Json s;
  for (std::size_t k = 0; k < m.second.size() && k < names.size(); ++k) s[names[k]] = num(m.second[k]);
  j["second"] = s;
  return j;
}

Json run_simulate(const RunConfig& c) {
  const Domain domain = load_domain(c.domain_file);
  const MaxwellianParams p = load_params(c.params_file);
  if (p.dim != domain.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "params and domain have different dimensions");
  }
  const Dim dim = domain.dim();
  SimOptions opt;
  opt.threads = c.threads;
  std::vector<double> cps = c.checkpoints;
  if (cps.empty()) {
    for (int k = 1; k < 4; ++k) cps.push_back(c.t_end * k / 4.0);
  }
  const StationarityReport rep =
      stationarity_test(p, domain, c.bc, c.particles, c.t_end, c.seed, cps, opt);

  if (!c.dump_particles.empty()) {
    // Same seed and stream layout, so these are the particles the report saw.
    const ParticleEnsemble e0 = sample_initial(p, domain, c.particles, c.seed, 0.0, opt);
    const ParticleEnsemble e = advance(e0, domain, c.bc, c.t_end, opt);
    std::ostringstream os;
    os.precision(17);
    const char* const xs[] = {"x", "y", "z"};
    for (int k = 0; k < size(dim); ++k) os << xs[k] << ',';
    for (int k = 0; k < size(dim); ++k) os << 'v' << xs[k] << ',';
    os << "events\n";
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < size(dim); ++k) os << e.x[i](k) << ',';
      for (int k = 0; k < size(dim); ++k) os << e.v[i](k) << ',';
      os << e.events[i] << '\n';
    }
    write_text(c.dump_particles, os.str());
  }

  Json j = header(c);
  j["domain_kind"] = domain.kind();
  j["dim"] = size(dim);
  Json s;
  s["particles"] = rep.particles;
  s["center"] = vec_json(rep.center, dim);
  s["axis"] = vec_json(rep.axis, Dim::Three);
  Json cpj = Json::array();
  for (const auto& cp : rep.checkpoints) {
    Json e;
    e["time"] = cp.time;
    e["moments"] = moments_json(cp.moments, rep.second_moment_names, dim);
    e["density_max_abs_z"] = num(cp.density_max_abs_z);
    cpj.push_back(e);
  }
  s["checkpoints"] = cpj;
  Json zj = Json::array();
  for (const auto& z : rep.z_scores) {
    Json e;
    e["name"] = z.name;
    e["z"] = num(z.z);
    zj.push_back(e);
  }
  s["z_scores"] = zj;
  s["max_moment_z"] = num(rep.max_moment_z);
  s["max_second_moment_z"] = num(rep.max_second_moment_z);
  s["angular_momentum_conserved"] = rep.angular_momentum_conserved;
  s["max_angular_drift"] = num(rep.max_angular_drift);
  s["speed_violations"] = rep.speed_violations;
  s["angular_violations"] = rep.angular_violations;
  s["events"] = rep.events;
  s["max_event_offset"] = num(rep.max_event_offset);
  s["acceptance"] = num(rep.acceptance);
  s["negative_control_threshold"] = rep.negative_control_threshold;
  s["negative_control_threshold_note"] =
      "engineering choice: a second-moment z-score at or above this flags non-stationarity";
  Json w = Json::array();
  for (const auto& x : rep.warnings) w.push_back(x);
  s["warnings"] = w;
  j["stationarity"] = s;
  return j;
}

Json run_factor(const RunConfig& c) {
  const MaxwellianParams p = load_params(c.params_file);
  if (p.dim == Dim::Two && c.x(2) != 0.0) {
    throw Error(ErrorKind::DimensionMismatch, "x has a third component in d=2");
  }
  const Factorization f = factor(p, c.t, c.x);
  const PdeResiduals pde = pde_system_residuals(p, c.t, c.x);
  Json j = header(c);
  j["dim"] = size(p.dim);
  j["a"] = num(f.a);
  j["u"] = vec_json(f.u, p.dim);
  j["rho"] = num(f.rho);
  j["rho_explicit"] = num(f.rho_explicit);
  Json fj;
  fj["sigma0"] = num(f.form.sigma0);
  fj["dsigma0"] = num(f.form.dsigma0);
  fj["c"] = vec_json(f.form.c, p.dim);
  fj["dc"] = vec_json(f.form.dc, p.dim);
  fj["rho0"] = num(f.form.rho0);
  fj["phi"] = num(f.form.phi);
  Json wj;
  wj["lo"] = num(f.form.positivity_window.lo);
  wj["hi"] = num(f.form.positivity_window.hi);
  fj["positivity_window"] = wj;
  j["form"] = fj;
  Json pj = Json::array();
  for (double x : pde.normalized) pj.push_back(num(x));
  j["pde_normalized_residuals"] = pj;
  j["pde_max_normalized_residual"] = num(pde.max_normalized());
  return j;
}

}  // namespace

std::string tool_version() { return EQKIT_VERSION; }

RunResult run(const RunConfig& config) {
  RunResult r;
  try {
    config.validate();
    switch (config.command) {
      case Command::Classify: r.report = run_classify(config); break;
      case Command::Verify: r.report = run_verify(config, r.exit_code); break;
      case Command::Trace: r.report = run_trace(config, r.csv); break;
      case Command::Simulate: r.report = run_simulate(config); break;
      case Command::Factor: r.report = run_factor(config); break;
    }
  } catch (const Error& e) {
    r.report = header(config);
    Json ej;
    ej["kind"] = std::string(to_string(e.kind()));
    ej["message"] = e.what();
    r.report["error"] = ej;
    r.exit_code = 1;
    r.csv.clear();
  } catch (const std::exception& e) {
    r.report = header(config);
    Json ej;
    ej["kind"] = "InternalError";
    ej["message"] = e.what();
    r.report["error"] = ej;
    r.exit_code = 1;
    r.csv.clear();
  }
  return r;
}

}  // namespace eqkit
