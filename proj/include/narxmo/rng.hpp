#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace narxmo {

// xoshiro256** 1.0 (Blackman & Vigna), state seeded through splitmix64.
// Floating-point draws are built from the raw 64-bit stream with explicit
// formulas so that sequences are identical across standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0x9E3779B97F4A7C15ULL);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform in [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double a, double b);
    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    // Standard normal via Box-Muller (the second variate is cached).
    double normal();
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::array<std::uint64_t, 4> s_{};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Mixes a master seed with string and integer coordinates into an
// independent stream seed: per-run seed = hash(master, system, cell, run).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t a = 0,
                          std::uint64_t b = 0);

}  // namespace narxmo
