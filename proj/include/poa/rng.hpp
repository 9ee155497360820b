#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace poa {

/// Seeded random source shared by every stochastic component.
///
/// All draws go through the standard distributions over a 64-bit Mersenne
/// twister, so a given seed reproduces bit-identical streams within a build.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    bool coin() { return std::bernoulli_distribution(0.5)(engine_); }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return std::bernoulli_distribution(p)(engine_);
    }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Index drawn with probability proportional to weights[i].
    std::size_t weighted_index(std::span<const double> weights) {
        return std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace poa
