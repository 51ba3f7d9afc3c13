#pragma once

#include <cstdint>
#include <random>

namespace exforce {

/// Deterministic per-task random stream. Simulations derive one stream per
/// (master seed, seed node, replicate) so results do not depend on which
/// worker thread runs which task.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    /// Exponential waiting time with the given rate.
    double exponential(double rate) {
        return std::exponential_distribution<double>(rate)(engine_);
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; decorrelates nearby seed values.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ (c + 0x632be59bd9b4e019ULL));
}

inline RngStream derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return RngStream(mix64(master, a, b));
}

}  // namespace exforce
