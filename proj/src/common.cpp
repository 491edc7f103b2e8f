#include "eqkit/error.hpp"
#include "eqkit/rng.hpp"
#include "eqkit/vec.hpp"

#include <cmath>
#include <sstream>

namespace eqkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::OutsidePositivityWindow: return "OutsidePositivityWindow";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::WrongArity: return "WrongArity";
    case ErrorKind::VariableNotAllowedInDim: return "VariableNotAllowedInDim";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ProjectionFailed: return "ProjectionFailed";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::SingularFieldDecomposition: return "SingularFieldDecomposition";
    case ErrorKind::CoeffLengthMismatch: return "CoeffLengthMismatch";
    case ErrorKind::UnboundedDomain: return "UnboundedDomain";
    case ErrorKind::StuckParticle: return "StuckParticle";
    case ErrorKind::EscapedParticle: return "EscapedParticle";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Dim dim_from_int(int d) {
  if (d == 2) return Dim::Two;
  if (d == 3) return Dim::Three;
  throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3, got " + std::to_string(d));
}

Vec any_orthogonal(const Vec& n) {
  // Cross with the canonical axis least aligned with n.
  Eigen::Index k = 0;
  n.cwiseAbs().minCoeff(&k);
  return n.cross(Vec::Unit(k)).normalized();
}

void orthonormal_frame(const Vec& n, Vec& e1, Vec& e2) {
  e1 = any_orthogonal(n);
  e2 = n.cross(e1);
}

std::string format_vec(const Vec& v, Dim d) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << v(0) << ", " << v(1);
  if (d == Dim::Three) os << ", " << v(2);
  os << ")";
  return os.str();
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng CounterRng::split(std::uint64_t sub) const noexcept {
  return CounterRng(mix64(key_ ^ mix64(stream_ + 0x632be59bd9b4e019ULL)), sub);
}

std::uint64_t CounterRng::next_u64() noexcept {
  const std::uint64_t base = mix64(key_ ^ mix64(stream_));
  return mix64(base + 0xd1b54a32d192ed03ULL * (++counter_));
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  // Box-Muller, one value per call.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace eqkit
