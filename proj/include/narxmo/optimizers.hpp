#pragma once

#include "narxmo/evo_core.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace narxmo {

enum class Algorithm { nsga2, spea2, moead };
enum class CrossoverKind { uniform, single_point };
enum class Aggregation { tchebycheff, weighted_sum };
// Crowded-tournament tie rule between equal-rank members.
enum class CtsTie { larger, smaller };

Algorithm parse_algorithm(const std::string& s);
CrossoverKind parse_crossover(const std::string& s);
Aggregation parse_aggregation(const std::string& s);
CtsTie parse_cts_tie(const std::string& s);
std::string to_string(Algorithm a);
std::string to_string(CrossoverKind c);
std::string to_string(Aggregation a);
std::string to_string(CtsTie t);

struct RunConfig {
    Algorithm algorithm = Algorithm::nsga2;
    std::size_t ps = 50;
    std::size_t fe_budget = 25000;
    double p_c = 0.9;
    double p_m = 0.006;
    CrossoverKind crossover = CrossoverKind::uniform;
    std::size_t spea2_k = 10;
    std::size_t moead_T = 5;
    std::size_t moead_nr = 2;
    Aggregation moead_aggregation = Aggregation::tchebycheff;
    CtsTie cts_tie = CtsTie::larger;
    std::size_t archive_capacity = 50;  // MOEA/D external archive
    // Initial genomes get a cardinality drawn uniformly from [1, init_max_terms];
    // 0 draws every bit with probability 1/2 instead.
    std::size_t init_max_terms = 20;
    // Generations stop at this multiple of fe_budget / ps even if cache hits
    // keep the novel-evaluation count below the budget.
    std::size_t generation_cap_factor = 20;
    std::uint64_t seed = 1;

    // Per-algorithm crossover / mutation defaults.
    static RunConfig defaults(Algorithm a);
    void validate() const;
};

struct RunResult {
    ParetoArchive archive;
    std::size_t evaluations = 0;  // novel objective evaluations
    std::size_t generations = 0;
};

// Called after every survival / archive update with the current first front.
using GenerationObserver = std::function<void(std::size_t generation, const std::vector<ArchiveEntry>& front)>;

// Fast non-dominated sort over (J1, J2). Front members ascend by index.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& objs);

// Per-objective normalized neighbour gaps summed; extremes are +infinity and
// an objective with zero range contributes nothing.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

// Strength-Pareto fitness over the union of population and archive:
// F = R + 1 / (sigma_k + 2).
struct Spea2Fitness {
    std::vector<int> strength;
    std::vector<double> raw;
    std::vector<double> density;
    std::vector<double> fitness;
};
Spea2Fitness spea2_fitness(const std::vector<ObjectiveVector>& objs, std::size_t k);

// Indices kept by SPEA-II environmental selection out of `objs`.
std::vector<std::size_t> spea2_environmental_selection(const std::vector<ObjectiveVector>& objs,
                                                       const Spea2Fitness& fit, std::size_t capacity);

// Iterative k-th nearest neighbour truncation of `members` down to `capacity`.
std::vector<std::size_t> spea2_truncate(const std::vector<ObjectiveVector>& objs, std::vector<std::size_t> members,
                                        std::size_t capacity);

using Weight = std::array<double, 2>;

// lambda_i = (i / (ps - 1), 1 - i / (ps - 1)).
std::vector<Weight> generate_weight_vectors(std::size_t ps);

// T nearest weights (Euclidean, ties by index), self included.
std::vector<std::vector<std::size_t>> weight_neighborhoods(const std::vector<Weight>& w, std::size_t T);

inline constexpr double kMinWeight = 1e-6;

double tchebycheff(const std::array<double, 2>& J, const Weight& w, const std::array<double, 2>& ideal);
double weighted_sum(const std::array<double, 2>& J, const Weight& w);

// Drops members of smallest crowding distance until size <= capacity.
void truncate_by_crowding(ParetoArchive& archive, std::size_t capacity);

RunResult run_nsga2(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs = {});
RunResult run_spea2(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs = {});
RunResult run_moead(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs = {});
RunResult run_optimizer(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs = {});

// Convenience: NARX structure selection on one dataset.
RunResult run_optimizer(const RunConfig& cfg, const ModelSet& ms, const Dataset& data, const GoalPoint& goal,
                        ErrorMode mode = ErrorMode::free_run);

}  // namespace narxmo
