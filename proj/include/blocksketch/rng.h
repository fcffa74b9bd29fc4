#ifndef BLOCKSKETCH_RNG_H_
#define BLOCKSKETCH_RNG_H_

#include <cstdint>
#include <random>

namespace blocksketch {

using RngSeed = std::uint64_t;

// Stream ids for SplitSeed. Each operation draws from its own stream so that
// adding draws to one step never perturbs another.
enum class Stream : std::uint32_t {
  kPartition = 1,
  kEdges = 2,
  kSubsample = 3,
  kSolverInit = 4,
  kRounding = 5,
  kTieBreak = 6,
  kGraph = 7,
  kSketch = 8,
};

// SplitMix64 finalizer. A bijection on 64-bit words.
std::uint64_t Mix64(std::uint64_t x);

// Derives a child seed from (seed, hi, lo). For a fixed seed the map
// (hi, lo) -> child is injective over hi, lo < 2^32.
RngSeed SplitSeed(RngSeed seed, std::uint64_t hi, std::uint64_t lo);

inline RngSeed SplitSeed(RngSeed seed, Stream stream, std::uint64_t index = 0) {
  return SplitSeed(seed, static_cast<std::uint64_t>(stream), index);
}

// Thin wrapper over std::mt19937_64. All derived variates are computed here
// from raw engine output so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [-1, 1).
  double Symmetric() { return 2.0 * Uniform() - 1.0; }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t Below(std::uint64_t bound);

  // Number of failures before the first success of a Bernoulli(p) sequence.
  // p must lie in (0, 1]. Returns UINT64_MAX when the skip overflows.
  std::uint64_t GeometricSkip(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace blocksketch

#endif  // BLOCKSKETCH_RNG_H_
