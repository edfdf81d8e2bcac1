#pragma once

#include <cstdint>

namespace alloy {

// SplitMix64 finaliser; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Per-sample seed. For a fixed master seed the map index -> seed is injective:
/// an odd multiplier, an offset and two bijective mixes.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t sample_index) {
    const std::uint64_t z = master_seed + (sample_index + 1) * 0x9E3779B97F4A7C15ULL;
    return mix64(mix64(z) ^ ((master_seed << 17) | (master_seed >> 47)));
}

} // namespace alloy
