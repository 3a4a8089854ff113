#pragma once

#include <cstdint>
#include <random>

namespace cascade {

using Rng = std::mt19937_64;

// The standard distributions are implementation-defined; these are not, so
// seeded runs reproduce across standard libraries.

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) by multiply-shift.
__extension__ using Uint128 = unsigned __int128;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<Uint128>(rng()) * n) >> 64);
}

} // namespace cascade
