#pragma once

#include "narxmo/datagen.hpp"
#include "narxmo/io.hpp"
#include "narxmo/mcdm.hpp"
#include "narxmo/optimizers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace narxmo {

struct ExperimentConfig {
    std::optional<SystemId> system;  // benchmark system, or
    std::string data_path;           // a "u,y" CSV file
    std::size_t estimation_len = 0;  // 0: system default, or 70% of a CSV
    std::size_t samples = 0;         // 0: system default
    ModelSetSpec model_set{4, 4, 3};
    GoalPoint goal;
    RunConfig run;
    std::size_t runs = 1;
    ErrorMode error_mode = ErrorMode::free_run;
    McdmMethod mcdm = McdmMethod::mmd;
    PreferenceSpec preference;
    double alpha = 0.05;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

// Strict parsing: unknown keys and wrong types raise ConfigError with the
// dotted field path.
ExperimentConfig parse_experiment_config(const json& j);
json experiment_config_to_json(const ExperimentConfig& c);
RunConfig parse_run_config(const json& j, const std::string& path);
json run_config_to_json(const RunConfig& r);

// Builds the dataset described by the config; benchmark data is seeded by the
// master seed.
Dataset load_dataset(const ExperimentConfig& c);

struct SearchResult {
    Dataset data;
    ModelSetSpec spec;
    std::vector<RunResult> runs;
    std::vector<std::uint64_t> run_seeds;
    ParetoArchive pooled;
};

// Runs c.runs independent optimizer runs (up to `workers` at a time) and pools
// their archives into one non-dominated set.
SearchResult run_search(const ExperimentConfig& c, std::size_t workers = 1);

// Writes every search artifact into `out` and returns the summary document.
json write_search_outputs(const ExperimentConfig& c, const SearchResult& r, const std::filesystem::path& out);

json cmd_search(const ExperimentConfig& c, std::size_t workers, const std::filesystem::path& out);

struct SweepConfig {
    std::vector<double> p_c;
    std::vector<double> p_m;
    std::vector<SystemId> systems{SystemId::S1};
    std::size_t runs = 20;
    std::vector<CrossoverKind> crossovers{CrossoverKind::uniform};
    RunConfig run;  // p_c, p_m and crossover are overwritten per cell
    ModelSetSpec model_set{4, 4, 3};
    GoalPoint goal;
    ErrorMode error_mode = ErrorMode::free_run;
    std::uint64_t seed = 1;

    static std::vector<double> default_p_c();
    static std::vector<double> default_p_m();
    std::size_t cells() const { return p_c.size() * p_m.size(); }
    void validate() const;
};

SweepConfig parse_sweep_config(const json& j);
json sweep_config_to_json(const SweepConfig& c);

struct SweepResult {
    // hvr[x][s][cell] for crossover x, system s; cell = i_pc * |p_m| + i_pm.
    std::vector<std::vector<std::vector<double>>> hvr;
    // pm_mean[x][cell]
    std::vector<std::vector<double>> pm_mean;
    // Pooled per-cell fronts archives[x][s][cell] and the per-system ideal
    // front (non-dominated union over every cell and crossover).
    std::vector<std::vector<std::vector<ParetoArchive>>> archives;
    std::vector<ParetoArchive> ideal;
    std::size_t runs_executed = 0;
    std::size_t evaluations = 0;
};

SweepResult run_sweep(const SweepConfig& c, std::size_t workers = 1);
json write_sweep_outputs(const SweepConfig& c, const SweepResult& r, const std::filesystem::path& out);
json cmd_sweep(const SweepConfig& c, std::size_t workers, const std::filesystem::path& out);

// Paired one-sided comparison of the second crossover against the first over
// every (system, cell) pair, plus one report per system when it has enough
// pairs.
json sweep_wilcoxon(const SweepConfig& c, const SweepResult& r);

// Rank an archive and return the ranked list.
RankedFront rank_archive(const std::vector<ArchiveEntry>& entries, McdmMethod method, const PreferenceSpec& pref);

// Model M_D1, M_D2 or M_D3 of the Duffing case study ("md1", "md2", "md3").
EstimatedModel duffing_reference_model(const std::string& name);

}  // namespace narxmo
