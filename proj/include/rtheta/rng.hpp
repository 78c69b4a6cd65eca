#pragma once
#include <cstdint>

namespace rtheta::rng {

/// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream value: each (seed, a, b, c, d) tuple maps to an
/// independent 64-bit word, so draws are reproducible regardless of the
/// order in which parallel workers request them.
inline std::uint64_t stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t h = mix(seed ^ 0x2545f4914f6cdd1dULL);
    h = mix(h ^ a);
    h = mix(h ^ b);
    h = mix(h ^ c);
    h = mix(h ^ d);
    return h;
}

/// Uniform double in [0, 1) from a stream word.
inline double to_unit(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                        std::uint64_t c = 0, std::uint64_t d = 0) {
    return to_unit(stream(seed, a, b, c, d));
}

/// Derives a child seed, e.g. one per trial or multistart branch.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return stream(seed, 0x5eedULL, index);
}

}  // namespace rtheta::rng
