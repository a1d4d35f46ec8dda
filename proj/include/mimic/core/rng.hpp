#pragma once

#include <cstdint>
#include <random>

namespace mimic {

// Seeded RNG wrapper. Every stochastic operation takes one of these (or a
// seed) explicitly; nothing in the library draws from global state.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double gaussian(double mean, double stddev) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }
    uint64_t integer(uint64_t lo, uint64_t hi) { // inclusive bounds
        return std::uniform_int_distribution<uint64_t>(lo, hi)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

    // Independent child stream; stable as long as the parent seed and the
    // stream index are stable.
    static Rng derive(uint64_t seed, uint64_t stream) {
        return Rng(seed * 0x9E3779B97F4A7C15ull + stream * 0xD1B54A32D192ED03ull + 1ull);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace mimic
