// Counter-based random number utilities.
//
// Everything in the simulator that needs randomness draws it through these
// helpers so that a sample is a pure function of (seed, stream labels).
// This keeps runs bit-reproducible across platforms and independent of
// evaluation order or worker count: the same (link, resource, slot) always
// sees the same fading draw, the same task index always sees the same
// workload draws, and so on.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ivnsim {

// Finalizer from the splitmix64 generator; good avalanche behavior.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Hash-combine a sequence of 64-bit labels into one stream key.
inline constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t p : parts) {
        h = mix64(h ^ p);
    }
    return h;
}

template <typename... Parts>
inline constexpr std::uint64_t derive_key(std::uint64_t first, Parts... rest) {
    return derive_key({first, static_cast<std::uint64_t>(rest)...});
}

// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
inline double bits_to_unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform double in [0, 1) for a given key; pure function of the key.
inline double unit_double_at(std::uint64_t key) { return bits_to_unit_double(mix64(key)); }

// Small stateful stream over the counter construction. Cheap to copy;
// two streams with different keys are independent for practical purposes.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(derive_key(key_, counter_++)); }

    // [0, 1)
    double next_unit() { return bits_to_unit_double(next_u64()); }

    // [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // {0, ..., n-1}; n must be > 0. Modulo bias is negligible for n << 2^64.
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return next_unit() < p; }

    // Exponential with the given mean (mean 0 yields identically 0).
    double exponential(double mean) {
        double u = next_unit();
        return mean <= 0.0 ? 0.0 : -mean * std::log1p(-u);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ivnsim
