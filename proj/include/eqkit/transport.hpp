#pragma once

// Free-transport particle simulation with exact wall reflections.
//
// Particles are independent; each one draws from its own counter-RNG stream
// and is advanced event by event. Cross-particle sums are taken serially in a
// fixed pairwise order after the parallel map, so the thread count never
// changes a reported number.

#include "eqkit/constraints.hpp"
#include "eqkit/geometry.hpp"
#include "eqkit/maxwellian.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eqkit {

struct ParticleEnsemble {
  Dim dim = Dim::Two;
  double time = 0.0;
  std::vector<Vec> x;
  std::vector<Vec> v;
  std::vector<std::uint64_t> events;  // wall events per particle so far

  std::size_t size() const { return x.size(); }
};

struct SimOptions {
  unsigned threads = 0;                    // 0: hardware concurrency
  std::uint64_t max_events = 1000000;      // per particle
  double scan_fraction = 0.01;             // scan step = fraction·scale/|v|
  int bisection_steps = 50;
  double acceptance_warning = 0.01;
  std::uint64_t max_attempts = 10000000;   // rejection draws per particle
};

struct SampleStats {
  std::uint64_t attempts = 0;
  double acceptance = 1.0;
  std::vector<std::string> warnings;
};

// Throws UnboundedDomain for shapes without a bounding box and
// OutsidePositivityWindow when σ0(t0) ≤ 0.
ParticleEnsemble sample_initial(const MaxwellianParams& params, const Domain& domain,
                                std::size_t n, std::uint64_t seed, double t0,
                                const SimOptions& opt = {}, SampleStats* stats = nullptr);

struct AdvanceStats {
  std::uint64_t events = 0;
  double max_speed_change = 0.0;     // relative, per event
  double max_event_offset = 0.0;     // |g|/|∇g| at events, over length scale
};

// Throws StuckParticle when a particle exceeds max_events and
// EscapedParticle when an event point is off the boundary by more than
// 1e-9 of the length scale.
ParticleEnsemble advance(const ParticleEnsemble& ens, const Domain& domain, BcKind bc,
                         double t_end, const SimOptions& opt = {}, AdvanceStats* stats = nullptr);

// Time of flight from x along v to the wall (inf when none within horizon).
// Exposed for tests.
double time_to_wall(const Domain& domain, const Vec& x, const Vec& v, double horizon,
                    const SimOptions& opt = {});

struct MomentSet {
  double mass = 0.0;                 // particle count, constant
  Vec momentum = Vec::Zero();        // mean v
  double energy = 0.0;               // mean |v|²/2
  double angular_momentum = 0.0;     // mean ((x-c)∧v)·axis
  std::vector<double> second;        // mean of each degree-2 monomial of (x-c, v)
};

struct Checkpoint {
  double time = 0.0;
  MomentSet moments;
  double density_max_abs_z = 0.0;    // binned counts vs analytic ρ(t,·)
};

struct ZScore {
  std::string name;
  double z = 0.0;
};

struct StationarityReport {
  std::size_t particles = 0;
  Vec center = Vec::Zero();           // origin for positions and angular momentum
  Vec axis = Vec::UnitZ();
  std::vector<std::string> second_moment_names;
  std::vector<Checkpoint> checkpoints;  // first entry is t0
  std::vector<ZScore> z_scores;         // final vs initial, paired per particle
  double max_moment_z = 0.0;
  double max_second_moment_z = 0.0;
  double max_angular_drift = 0.0;       // per particle |L_end - L_0|, when L is conserved
  bool angular_momentum_conserved = false;
  std::uint64_t speed_violations = 0;   // particles with relative |v| change > 1e-12
  std::uint64_t angular_violations = 0; // particles with drift > 1e-7
  std::uint64_t events = 0;
  double max_event_offset = 0.0;
  double acceptance = 1.0;
  std::vector<std::string> warnings;
  double negative_control_threshold = 5.0;  // engineering choice, see README
};

StationarityReport stationarity_test(const MaxwellianParams& params, const Domain& domain,
                                     BcKind bc, std::size_t n, double t_end, std::uint64_t seed,
                                     const std::vector<double>& checkpoints,
                                     const SimOptions& opt = {});

// Sum in a fixed pairwise tree; independent of how the values were produced.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace eqkit
