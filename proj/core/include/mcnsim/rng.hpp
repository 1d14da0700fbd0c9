#pragma once

#include <cstdint>
#include <random>

namespace mcnsim {

// SplitMix64 finalizer. Used as a counter-based generator: draw(seed, counter)
// is a pure function, so per-item draws do not depend on evaluation order.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// std::uniform_*_distribution output is implementation-defined; these helpers
// keep generated workloads identical across standard libraries.
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * to_unit(gen());
}

inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  return static_cast<std::uint64_t>(to_unit(gen()) * static_cast<double>(n));
}

}  // namespace mcnsim
