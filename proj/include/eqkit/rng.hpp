#pragma once

#include <cstdint>

namespace eqkit {

// Counter-based generator: the n-th draw of stream s under key k is a pure
// function of (k, s, n), so work split across threads by stream stays
// reproducible.
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t stream = 0) noexcept
      : key_(key), stream_(stream) {}

  CounterRng split(std::uint64_t sub) const noexcept;

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;  // [0, 1)
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace eqkit
