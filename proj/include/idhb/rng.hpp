#pragma once

#include <cstdint>

namespace idhb {

// Counter-based splitmix64. The full generator state is {seed, position},
// which makes positioning O(1) and serialization exact — no opaque engine
// state. Sequences are identical across platforms and builds.
struct SplitMixRng {
    std::uint64_t seed = 0;
    std::uint64_t position = 0;

    static constexpr const char* kAlgorithmName = "splitmix64";

    std::uint64_t next_u64() {
        ++position;
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * position;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). Modulo bias is irrelevant at the sizes used here;
    // determinism is what matters.
    std::int64_t uniform_int(std::int64_t n) {
        return static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(n));
    }

    friend bool operator==(const SplitMixRng&, const SplitMixRng&) = default;
};

} // namespace idhb
