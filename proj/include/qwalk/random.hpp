#pragma once

#include <cstdint>

namespace qwalk {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so phases attached to a lattice index are the same whatever window is materialized.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_bits(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) noexcept {
  std::uint64_t h = splitmix64(seed ^ 0xD1B54A32D192ED03ULL);
  h = splitmix64(h ^ (stream * 0xA0761D6478BD642FULL));
  return splitmix64(h ^ (counter * 0xE7037ED1A0B428DBULL));
}

/// Uniform double in [0,1) with 53 random bits.
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Independent seed for replica `index` of a run with master seed `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix_bits(master, 0x5EED5EED5EEDULL, index);
}

// Stream tags keep phase families of one seed disjoint.
enum class Stream : std::uint64_t {
  kSpatial = 1,
  kTemporal = 2,
  kTransfer = 3,
};

}  // namespace qwalk
