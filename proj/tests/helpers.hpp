#pragma once

#include "narxmo/datagen.hpp"
#include "narxmo/evo_core.hpp"
#include "narxmo/rng.hpp"

#include <vector>

namespace test {

inline narxmo::Dataset make_dataset(std::vector<double> u, std::vector<double> y, std::size_t est) {
    narxmo::Dataset d;
    d.u = std::move(u);
    d.y = std::move(y);
    d.estimation_len = est;
    d.name = "toy";
    return d;
}

// Benchmark data with the additive output noise switched off.
inline narxmo::Dataset noise_free(narxmo::SystemId id, std::uint64_t seed = 1) {
    auto spec = narxmo::benchmark_system(id, seed);
    spec.noise = narxmo::NoiseSpec::wgn(0, 0, spec.noise.seed);
    return narxmo::simulate(spec);
}

inline narxmo::ObjectiveVector obj(double j1, double j2) {
    narxmo::ObjectiveVector o;
    o.j1 = j1;
    o.j2 = j2;
    o.xi = static_cast<int>(j1);
    o.nmse = j2;
    return o;
}

inline narxmo::ArchiveEntry entry(const std::string& bits, int xi, double nmse) {
    narxmo::ArchiveEntry e;
    e.genome = narxmo::Genome::from_string(bits);
    e.objectives = narxmo::penalized_objectives(xi, nmse, narxmo::GoalPoint{});
    return e;
}

inline std::vector<narxmo::ObjectiveVector> random_objs(narxmo::Rng& rng, std::size_t n, int grid = 0) {
    std::vector<narxmo::ObjectiveVector> v;
    for (std::size_t i = 0; i < n; ++i) {
        double a = rng.uniform01(), b = rng.uniform01();
        if (grid > 0) {
            a = static_cast<double>(rng.below(static_cast<std::uint64_t>(grid)));
            b = static_cast<double>(rng.below(static_cast<std::uint64_t>(grid)));
        }
        v.push_back(obj(a, b));
    }
    return v;
}

}  // namespace test
