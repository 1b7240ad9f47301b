#pragma once

#include "narxmo/narx.hpp"
#include "narxmo/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace narxmo {

// White uniform noise on [a, b] or white Gaussian noise with the given mean
// and variance. WGN with zero variance is a constant sequence.
struct NoiseSpec {
    enum class Kind { uniform, gaussian };
    Kind kind = Kind::uniform;
    double a = 0.0;  // uniform lower bound, or gaussian mean
    double b = 1.0;  // uniform upper bound, or gaussian variance
    std::uint64_t seed = 0;

    static NoiseSpec wun(double lo, double hi, std::uint64_t seed = 0) { return {Kind::uniform, lo, hi, seed}; }
    static NoiseSpec wgn(double mean, double variance, std::uint64_t seed = 0) {
        return {Kind::gaussian, mean, variance, seed};
    }
    void validate() const;
};

std::vector<double> generate_noise(const NoiseSpec& spec, std::size_t n);

struct DuffingParams {
    double omega_n = 45.0 * 3.14159265358979323846;
    double zeta = 0.01;
    double epsilon = 3.0;
};

enum class SystemId { S1, S2, S3, S4, S5, S6, S7, duffing, external };

struct SystemSpec {
    SystemId id = SystemId::S1;
    std::vector<std::pair<Term, double>> structure;  // discrete systems only
    DuffingParams duffing;
    NoiseSpec input;
    NoiseSpec noise;
    std::size_t samples = 1000;
    std::size_t estimation_len = 700;
    double fs = 500.0;           // duffing output sampling rate, Hz
    int substeps = 10;           // RK4 steps per output sample
    std::size_t warmup = 50;     // discarded leading samples
};

SystemId parse_system_id(const std::string& s);
std::string to_string(SystemId id);

// Published benchmark definition with default excitation, seeded from `seed`.
SystemSpec benchmark_system(SystemId id, std::uint64_t seed = 0);

// True term list of a discrete benchmark system.
std::vector<Term> true_structure(SystemId id);

// Realizations whose output exceeds kDivergenceBound are redrawn, at most
// kMaxRedraws times.
inline constexpr std::size_t kMaxRedraws = 100;
Dataset simulate_discrete(const SystemSpec& spec);

// Integrates y'' + 2 zeta wn y' + wn^2 y + wn^2 eps y^3 = u from rest with
// classical RK4, holding each input sample constant over its interval.
// Returns the output sampled at fs, one value per input sample.
std::vector<double> integrate_duffing(const DuffingParams& p, std::span<const double> u, double fs, int substeps);

Dataset simulate_duffing(const SystemSpec& spec);

// Dispatches on spec.id.
Dataset simulate(const SystemSpec& spec);

// Two-column CSV with header "u,y". Malformed rows raise ParseError with the
// offending line number.
Dataset load_csv(const std::filesystem::path& path, std::size_t estimation_len, std::string name = {});
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace narxmo
