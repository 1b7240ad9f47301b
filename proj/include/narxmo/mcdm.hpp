#pragma once

#include "narxmo/evo_core.hpp"

#include <array>
#include <string>
#include <vector>

namespace narxmo {

struct PreferenceSpec {
    std::vector<int> objective_ranks{1, 2};  // permutation of 1..m, 1 = most important
    double intensity = 5.0;                   // in [1, 9]

    void validate() const;
};

// a_ij = I^((O_j - O_i) / (m - 1)); w_i = (prod_j a_ij)^(1/m), normalized.
std::vector<double> preference_weights(const PreferenceSpec& spec);

// Unnormalized geometric means (prod_j a_ij)^(1/m), before normalization.
std::vector<double> preference_weights_raw(const PreferenceSpec& spec);

enum class McdmMethod { mmd, mtd };
McdmMethod parse_mcdm_method(const std::string& s);
std::string to_string(McdmMethod m);

struct RankedEntry {
    Genome genome;
    ObjectiveVector objectives;
    double score = 0.0;
};

struct RankedFront {
    McdmMethod method = McdmMethod::mmd;
    std::vector<RankedEntry> entries;
};

// Both rankers drop dominated points and duplicate genomes first and break
// score ties by smaller xi, smaller nmse, then genome bits.
RankedFront mmd_rank(const std::vector<ArchiveEntry>& front);
RankedFront mtd_rank(const std::vector<ArchiveEntry>& front, const std::vector<double>& w);

// Tournament wins T_p(i) for every point, exposed for tests.
std::vector<std::array<double, 2>> tournament_scores(const std::vector<ArchiveEntry>& front);

}  // namespace narxmo
