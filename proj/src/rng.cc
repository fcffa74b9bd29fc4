#include "blocksketch/rng.h"

#include <cmath>
#include <cstdint>
#include <limits>

namespace blocksketch {

std::uint64_t Mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

RngSeed SplitSeed(RngSeed seed, std::uint64_t hi, std::uint64_t lo) {
  const std::uint64_t counter = (hi << 32) | (lo & 0xffffffffULL);
  return Mix64(Mix64(seed + 0x9e3779b97f4a7c15ULL) ^ Mix64(counter));
}

std::uint64_t Rng::Below(std::uint64_t bound) {
  // Rejection on the top of the range keeps the result exactly uniform.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t Rng::GeometricSkip(double p) {
  if (p >= 1.0) return 0;
  // 1 - U lies in (0, 1], so the log is finite.
  const double u = 1.0 - Uniform();
  const double skip = std::floor(std::log(u) / std::log1p(-p));
  if (!(skip < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(skip);
}

}  // namespace blocksketch
