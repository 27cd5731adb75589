#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace camo {

using Rng = std::mt19937_64;

// Portable draws on top of mt19937_64: the standard distributions are
// implementation-defined, these are not.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n).
inline uint64_t uniform_index(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

/// Uniform integer in [lo, hi].
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_index(rng, static_cast<uint64_t>(hi - lo + 1)));
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

/// k distinct indices from [0, n) in draw order.
inline std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(uniform_index(rng, static_cast<uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

inline double normal(std::mt19937_64& rng) {
    // Box-Muller; one draw per call keeps the stream easy to reason about.
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace camo
