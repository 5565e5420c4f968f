#pragma once

#include <cstdint>
#include <random>

#include "mmtc/types.hpp"

namespace mmtc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: a pure function of (base, counter) so that
/// adding trials never perturbs the streams of earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
    return splitmix64(splitmix64(base) ^ splitmix64(counter + 0xD1B54A32D192ED03ULL));
}

// Stream tags inside one trial.
enum class Stream : std::uint64_t {
    activity = 1,
    channel = 2,
    frame = 3,
    noise = 4,
    csi_error = 5,
    code = 6,
    fading = 7,
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    Rng(std::uint64_t seed, Stream tag) : engine_(derive_seed(seed, static_cast<std::uint64_t>(tag))) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    double normal() { return normal_(engine_); }

    /// CN(0, variance): real and imaginary parts each carry variance/2.
    cd complex_normal(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mmtc
