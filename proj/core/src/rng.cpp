#include "sbrisk/rng.hpp"

namespace sbrisk {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index) noexcept {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(tag)) + index);
}

Engine make_engine(std::uint64_t master, StreamTag tag, std::uint64_t index) {
  return Engine(derive_seed(master, tag, index));
}

}  // namespace sbrisk
