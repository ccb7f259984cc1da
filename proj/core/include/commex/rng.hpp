#pragma once

#include <cstdint>
#include <random>

namespace commex {

using Rng = std::mt19937_64;

/// Named sub-streams so that independent stages never share random draws.
enum class Stream : std::uint32_t {
  kMacSeeding = 1,
  kAgmInference = 2,
  kParamInit = 3,
  kRandomQuery = 4,
  kSynthetic = 5,
  kSyntheticFeatures = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace commex
