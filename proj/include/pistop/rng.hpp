#pragma once

#include <cstdint>
#include <limits>

namespace pistop {

// PCG32: small, fast, seedable, and splittable into independent streams via
// the (odd) increment. Stream k of seed s is the generator for path/trial k,
// so results do not depend on how work is scheduled across workers.
struct Pcg32 {
    using result_type = std::uint32_t;

    std::uint64_t state = 0;
    std::uint64_t inc = 0;

    Pcg32(std::uint64_t seed, std::uint64_t stream_id) {
        inc = (stream_id << 1u) | 1u;
        state = 0;
        (*this)();
        state += seed;
        (*this)();
    }

    std::uint32_t operator()() {
        std::uint64_t old = state;
        state = old * 6364136223846793005ULL + inc;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    static constexpr std::uint32_t min() { return 0u; }
    static constexpr std::uint32_t max() { return 0xFFFFFFFFu; }
};

/// Uniform draw in the open interval (0, 1): never returns 0 or 1.
inline double uniform01(Pcg32& rng) {
    constexpr double inv = 1.0 / 4294967296.0;  // 2^-32
    return (static_cast<double>(rng()) + 0.5) * inv;
}

/// Uniform integer in [1, k]; multiply-shift, bias below 2^-32.
inline std::int64_t uniform_int_1_to_k(Pcg32& rng, std::int64_t k) {
    return 1 + static_cast<std::int64_t>(
                   (static_cast<std::uint64_t>(rng()) * static_cast<std::uint64_t>(k)) >> 32u);
}

}  // namespace pistop
