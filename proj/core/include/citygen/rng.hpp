#pragma once

#include <cstdint>

namespace citygen {

/// Counter-derived random stream. Each (seed, tick, stream id) triple yields an
/// independent sequence, so results do not depend on evaluation order.
///
/// Bounded draws use rejection sampling instead of <random> distributions,
/// whose output is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t tick = 0, std::uint64_t stream = 0);

  std::uint64_t next();
  /// Uniform integer in [0, n). n must be positive.
  std::uint32_t below(std::uint32_t n);
  /// Uniform real in [0, 1) with 53 bits of precision.
  double unit();

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace citygen
