#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace dselect {

// Deterministic 64-bit generator (splitmix64 stream). All randomized code in
// the library draws from this so results are reproducible across platforms
// and standard-library versions; std::shuffle / std::*_distribution are
// implementation-defined and must not be used where output determinism
// matters.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double nextDouble() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        return next() % n;
    }

    // Standard normal via Box-Muller (no cached spare, keeps the stream
    // consumption rate fixed at two draws per call).
    double nextGaussian() {
        const double u1 = 1.0 - nextDouble();  // (0, 1]
        const double u2 = nextDouble();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Fisher-Yates over an index vector.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives a child seed from a master seed and a path of stream identifiers.
// Used wherever independent deterministic streams are needed (per pool
// member, per experiment cell, ...) so that parallel execution order cannot
// change any result.
inline std::uint64_t deriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master ^ 0xA0761D6478BD642FULL);
    for (std::uint64_t p : path) {
        h = mix64(h ^ (p + 0x9E3779B97F4A7C15ULL));
    }
    return h;
}

}  // namespace dselect
