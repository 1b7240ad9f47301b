#pragma once

#include "narxmo/narx.hpp"
#include "narxmo/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace narxmo {

// Fixed-length bit vector; bit i selects term i of the model set.
class Genome {
public:
    Genome() = default;
    explicit Genome(std::size_t n) : bits_(n, 0) {}
    explicit Genome(std::vector<std::uint8_t> bits);
    static Genome from_string(const std::string& bits);  // "10110"

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
    void flip(std::size_t i) { bits_[i] ^= 1; }
    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }
    std::vector<std::size_t> indices() const;
    std::string to_string() const;

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    friend auto operator<=>(const Genome&, const Genome&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct GenomeHash {
    std::size_t operator()(const Genome& g) const noexcept;
};

struct GoalPoint {
    int xi_lim = 20;
    double nmse_lim = 30.0;

    void validate() const;
};

struct ObjectiveVector {
    int xi = 0;
    double nmse = 0.0;
    double penalty = 0.0;
    double j1 = 0.0;
    double j2 = 0.0;
};

inline constexpr double kPenaltyFactor = 10.0;

// P = 10 * (<nmse_lim - nmse> + <xi_lim - xi>), where <x> = |x| if x < 0 else 0.
ObjectiveVector penalized_objectives(int xi, double nmse, const GoalPoint& goal);

// Pareto dominance over (J1, J2), minimization.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;
bool dominates(double a1, double a2, double b1, double b2) noexcept;

std::vector<Term> decode(const Genome& g, const ModelSet& ms);

// Parameterized uniform crossover: with probability p_c each locus swaps
// between the offspring with probability 1/2; otherwise plain copies.
std::pair<Genome, Genome> uniform_crossover(const Genome& p, const Genome& q, double p_c, Rng& rng);

// With probability p_c swap suffixes after a cut drawn uniformly in [1, n-1].
std::pair<Genome, Genome> single_point_crossover(const Genome& p, const Genome& q, double p_c, Rng& rng);
// Deterministic cut, exposed for testing.
std::pair<Genome, Genome> single_point_crossover_at(const Genome& p, const Genome& q, std::size_t cut);

// Independent flips with probability p_m; an all-zero result gets one
// uniformly chosen bit set.
Genome flip_bit_mutation(Genome g, double p_m, Rng& rng);
void repair_empty(Genome& g, Rng& rng);

struct ArchiveEntry {
    Genome genome;
    ObjectiveVector objectives;
};

// Mutually non-dominated (J1, J2) set without duplicate genomes.
class ParetoArchive {
public:
    ParetoArchive() = default;
    explicit ParetoArchive(std::optional<std::size_t> capacity) : capacity_(capacity) {}

    // Returns true when the entry was added.
    bool insert(const ArchiveEntry& e);

    const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::optional<std::size_t> capacity() const noexcept { return capacity_; }
    bool contains(const Genome& g) const;

    // Removes the entries at `idx` (any order).
    void erase(std::vector<std::size_t> idx);
    // Sorts by (J1, J2, bits) for stable output.
    void sort();

private:
    std::vector<ArchiveEntry> entries_;
    std::optional<std::size_t> capacity_;
};

ParetoArchive archive_from(const std::vector<ArchiveEntry>& entries);

// Objective function over genomes of fixed length.
class Problem {
public:
    virtual ~Problem() = default;
    virtual std::size_t genome_length() const = 0;
    virtual ObjectiveVector evaluate(const Genome& g) = 0;
};

// Memoizing wrapper. Only novel genomes count as function evaluations.
class CachedEvaluator {
public:
    explicit CachedEvaluator(Problem& p) : problem_(&p) {}

    const ObjectiveVector& operator()(const Genome& g);
    std::size_t evaluations() const noexcept { return evaluations_; }
    std::size_t lookups() const noexcept { return lookups_; }
    std::size_t genome_length() const { return problem_->genome_length(); }

private:
    Problem* problem_;
    std::unordered_map<Genome, ObjectiveVector, GenomeHash> cache_;
    std::size_t evaluations_ = 0;
    std::size_t lookups_ = 0;
};

// Structure-selection objective on one dataset: decode, least-squares fit on
// the estimation partition, NMSE on the validation partition, goal penalty.
// The full candidate regressor is built once and columns are gathered per
// genome.
class NarxProblem final : public Problem {
public:
    NarxProblem(const ModelSet& ms, const Dataset& data, GoalPoint goal, ErrorMode mode = ErrorMode::free_run);

    std::size_t genome_length() const override { return ms_->size(); }
    ObjectiveVector evaluate(const Genome& g) override;

    // Fitted model for a genome (no penalty bookkeeping).
    EstimatedModel fit(const Genome& g) const;
    double validation_nmse(const EstimatedModel& m) const;

    const ModelSet& model_set() const noexcept { return *ms_; }
    const Dataset& data() const noexcept { return *data_; }
    const GoalPoint& goal() const noexcept { return goal_; }

private:
    const ModelSet* ms_;
    const Dataset* data_;
    GoalPoint goal_;
    ErrorMode mode_;
    Rows est_rows_;
    Rows val_rows_;
    Eigen::MatrixXd full_;    // estimation rows x all terms
    Eigen::VectorXd target_;  // estimation outputs
};

}  // namespace narxmo
