#include "citygen/rng.hpp"

namespace citygen {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t tick, std::uint64_t stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (tick * 0xd1342543de82ef95ULL));
  h = splitmix64(h ^ (stream * 0xa0761d6478bd642fULL + 0x2545f4914f6cdd1dULL));
  state_ = h;
}

std::uint64_t RngStream::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint32_t RngStream::below(std::uint32_t n) {
  // Lemire's multiply-shift with rejection of the biased low band.
  std::uint64_t m = (next() >> 32) * static_cast<std::uint64_t>(n);
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
    while (low < threshold) {
      m = (next() >> 32) * static_cast<std::uint64_t>(n);
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

double RngStream::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

}  // namespace citygen
