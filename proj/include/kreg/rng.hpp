#pragma once

#include <cstdint>

namespace kreg::rng {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so independent draws can be produced in any order
// or from any thread with identical results.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = mix(seed + kGolden);
    h = mix(h ^ (stream + kGolden));
    h = mix(h ^ (counter + kGolden));
    return h;
}

// Uniform draw strictly inside (0,1).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t bits = key(seed, stream, counter) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Stable 64-bit string hash (FNV-1a) for deriving per-asset streams.
inline std::uint64_t fnv1a(const char* s, std::uint64_t len) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::uint64_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(s[i]);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace kreg::rng
