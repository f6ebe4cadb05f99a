#pragma once

#include <cstdint>

namespace bls {

// Counter-based splitmix64 generator. Every random tensor in the project is
// drawn from its own stream keyed by (seed, tag), so generation order never
// affects the values and appending tensors cannot disturb existing ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    Rng(std::uint64_t seed, std::uint64_t tag)
        : state_(mix(seed ^ (tag * 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform draw from [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer draw from [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Standard normal via Box-Muller, kept here so draws are identical on
    /// every platform (std::normal_distribution is not).
    double normal();

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Derives an independent child seed, used for per-run seeds in the harness.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    Rng r(master, 0x6368696c64ULL + index); // "child" + index
    return r.next();
}

} // namespace bls
