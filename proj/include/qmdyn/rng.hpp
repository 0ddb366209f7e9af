// Pinned deterministic PRNG. All randomness in the project flows through
// splitmix64 so that every seeded experiment is reproducible bit-for-bit,
// across platforms and across reimplementations in other languages.
#pragma once

#include <cstdint>

namespace qmdyn {

struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

/// Worker-indexed sub-seed: seed_i = splitmix64(seed XOR i).
inline constexpr std::uint64_t subseed(std::uint64_t seed, std::uint64_t worker) {
    return SplitMix64(seed ^ worker).next();
}

/// Order-preserving fold of Z into the unsigned range: 0,-1,1,-2,2,... -> 0,1,2,3,4,...
inline constexpr std::uint64_t zigzag64(long long n) {
    if (n >= 0) return 2ULL * static_cast<std::uint64_t>(n);
    return 2ULL * static_cast<std::uint64_t>(-(n + 1)) + 1ULL;
}

}  // namespace qmdyn
