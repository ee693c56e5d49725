#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

#include "prcnn/error.hpp"

namespace prcnn {

namespace detail {

// splitmix64 (Steele, Lea, Flood 2014). Used to expand a user seed into
// xoshiro state and to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Derives a seed for an independent sub-stream (model init, shuffling,
// dropout, ...) from a run seed and a fixed stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0xA0761D6478BD642FULL * (stream + 1));
    return detail::splitmix64(x);
}

// Deterministic PRNG: xoshiro256** (Blackman & Vigna 2018), seeded through
// splitmix64. Pure 64-bit integer arithmetic, so identical seeds produce
// identical streams on every platform. Gaussian draws use Box-Muller on the
// raw stream instead of std::normal_distribution, whose output is
// implementation-defined.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = detail::splitmix64(x);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        if (!(lo < hi)) throw parameter_error("uniform: requires lo < hi");
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double gauss() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();  // log(0) guard
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw parameter_error("next_below: n must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Seeded Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

}  // namespace prcnn
