#pragma once

#include <cstdint>
#include <random>

namespace wobblelab {

/// Uniform integer in [0, n) by multiply-shift with rejection (Lemire).
/// Unlike std::uniform_int_distribution the result sequence is the same on
/// every standard library.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Independent stream for trial `index` of a run seeded with `seed`.
inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace wobblelab
