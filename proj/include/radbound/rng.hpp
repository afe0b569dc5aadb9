#pragma once

#include <cstdint>
#include <random>

namespace radbound {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent engine for a (master seed, stream) pair. mt19937_64 output is
/// fully specified by the standard, so sequences are portable.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed + 0x632be59bd9b4e019ULL * (stream + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return std::mt19937_64(a ^ (b << 1));
}

/// Uniform double in [0, 1). Hand-rolled: std distributions are not portable.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

/// +1 or -1, equal probability.
inline int rademacher_sign(std::mt19937_64& g) {
    return (g() >> 63) ? 1 : -1;
}

/// Uniform index in [0, n), rejection sampled (no modulo bias).
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    for (;;) {
        std::uint64_t v = g();
        if (v < limit) return v % n;
    }
}

}  // namespace radbound
