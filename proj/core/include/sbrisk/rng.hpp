#pragma once

#include <cstdint>
#include <random>

namespace sbrisk {

/// Default master seed used by every randomized entry point.
inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Purposes of derived streams. Distinct tags give statistically
/// independent streams for the same (seed, index).
enum class StreamTag : std::uint64_t {
  kDesign = 1,
  kNoise = 2,
  kSigns = 3,
  kDirections = 4,
  kProbes = 5,
  kCounterexample = 6,
  kTrial = 7,
  kGeneric = 8,
};

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-style seed derivation: a pure function of (master, tag, index).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index = 0) noexcept;

using Engine = std::mt19937_64;

/// Engine seeded from a derived seed.
[[nodiscard]] Engine make_engine(std::uint64_t master, StreamTag tag, std::uint64_t index = 0);

/// Random sign in {-1, +1}.
[[nodiscard]] inline double random_sign(Engine& eng) {
  return (eng() >> 63) != 0 ? 1.0 : -1.0;
}

}  // namespace sbrisk
