#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace qclust {

// Counter-based generator built on the splitmix64 finalizer. Every stream is
// addressed by a key tuple, so a value depends only on (seed, keys) and never
// on how many draws other streams have consumed. That is what makes oracle
// answers independent of the algorithm-side query schedule.
namespace detail {
inline uint64_t splitmix64_step(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

inline uint64_t mix64(uint64_t a, uint64_t b) {
    uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    return detail::splitmix64_step(s);
}

inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) { return mix64(mix64(a, b), c); }
inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
    return mix64(mix64(a, b, c), d);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static Rng keyed(uint64_t seed, uint64_t k1) { return Rng(mix64(seed, k1)); }
    static Rng keyed(uint64_t seed, uint64_t k1, uint64_t k2) { return Rng(mix64(seed, k1, k2)); }
    static Rng keyed(uint64_t seed, uint64_t k1, uint64_t k2, uint64_t k3) {
        return Rng(mix64(seed, k1, k2, k3));
    }

    uint64_t next_u64() { return detail::splitmix64_step(state_); }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    Rng split(uint64_t key) { return Rng(mix64(next_u64(), key)); }

private:
    uint64_t state_;
};

template <typename T>
void shuffle_inplace(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = rng.below(i);
        std::swap(v[i - 1], v[j]);
    }
}

// Deterministic sample of `count` distinct elements, order of draw preserved.
template <typename T>
std::vector<T> sample_without_replacement(std::span<const T> pool, size_t count, Rng& rng) {
    std::vector<T> scratch(pool.begin(), pool.end());
    if (count > scratch.size()) count = scratch.size();
    std::vector<T> out;
    out.reserve(count);
    size_t remaining = scratch.size();
    for (size_t i = 0; i < count; ++i) {
        size_t j = rng.below(remaining);
        out.push_back(scratch[j]);
        scratch[j] = scratch[remaining - 1];
        --remaining;
    }
    return out;
}

template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, size_t count, Rng& rng) {
    return sample_without_replacement(std::span<const T>(pool), count, rng);
}

}  // namespace qclust
