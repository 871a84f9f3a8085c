#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Seed derivation and sampling helpers. std::mt19937_64 output is fully
// specified by the standard; the distributions here are hand-rolled because
// std::normal_distribution and friends are implementation-defined and would
// break cross-platform reproducibility.

namespace tsc::rng {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix(splitmix(a) ^ (b + 0x9e3779b97f4a7c15ull));
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

/// Standard normal via Box-Muller. Draws exactly two variates per call.
inline double normal(std::mt19937_64& gen) {
    const double u1 = 1.0 - uniform01(gen); // (0, 1], keeps log finite
    const double u2 = uniform01(gen);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

/// Uniform index in [0, n). n must be positive.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
    return static_cast<std::size_t>(gen() % n);
}

/// Uniform integer in [lo, hi] inclusive.
inline long long uniform_int(std::mt19937_64& gen, long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<long long>(gen() % span);
}

/// In-place Fisher-Yates shuffle (std::shuffle is implementation-defined).
template <class T>
void shuffle(std::mt19937_64& gen, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = uniform_index(gen, i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace tsc::rng
