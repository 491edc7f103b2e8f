#pragma once

// TOML loaders for params, domains and fields. All failures surface as
// Error(ConfigError) naming the file and key.

#include "eqkit/constraints.hpp"
#include "eqkit/flows.hpp"
#include "eqkit/geometry.hpp"
#include "eqkit/maxwellian.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eqkit {

// Keys: dim, r0, alpha, beta, gamma, lambda0 (scalar in d=2, 3-array in
// d=3), w1, w2.
MaxwellianParams load_params(const std::string& path);
MaxwellianParams parse_params(std::string_view toml, const std::string& origin = "<string>");

// Keys: dim, kind, then the shape's own keys (see README).
Domain load_domain(const std::string& path);
Domain parse_domain(std::string_view toml, const std::string& origin = "<string>");

// Keys: dim, kind = "dilation" | "screw", alpha, lambda0, beta, c.
AffineField load_field(const std::string& path);
AffineField parse_field(std::string_view toml, const std::string& origin = "<string>");

// Comma separated numbers, e.g. "1,0,0".
Vec parse_vector(std::string_view text);

enum class Command { Classify, Verify, Trace, Simulate, Factor };

std::string_view to_string(Command c);

struct RunConfig {
  Command command = Command::Classify;
  std::string domain_file;
  std::string params_file;
  std::string field_file;
  BcKind bc = BcKind::Specular;
  std::size_t samples = 256;
  std::uint64_t seed = 42;
  double tol = kDefaultTol;
  std::string out;  // report path; empty means stdout
  std::string dump_matrix;

  // trace
  Vec x0 = Vec::Zero();
  double t_end = 2.0;
  int steps = 10000;
  std::string method = "closed_form";

  // simulate
  std::size_t particles = 100000;
  std::vector<double> checkpoints;
  unsigned threads = 0;
  std::string dump_particles;

  // factor
  double t = 0.0;
  Vec x = Vec::Zero();

  // Throws ConfigError when a required file is missing or a value is out of
  // range (samples < 8, tol ≤ 0, ...).
  void validate() const;
};

}  // namespace eqkit
