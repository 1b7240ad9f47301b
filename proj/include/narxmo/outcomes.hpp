#pragma once

#include "narxmo/evo_core.hpp"

#include <array>
#include <string>
#include <vector>

namespace narxmo {

enum class OutcomeLabel { exact_fitting, over_fitting, under_fitting_1, under_fitting_2 };
inline constexpr std::array<OutcomeLabel, 4> kOutcomeLabels{
    OutcomeLabel::exact_fitting, OutcomeLabel::over_fitting, OutcomeLabel::under_fitting_1,
    OutcomeLabel::under_fitting_2};
std::string to_string(OutcomeLabel l);

struct RefineResult {
    EstimatedModel model;
    std::vector<Term> removed;  // in removal order
    bool degenerate = false;    // every term was removed
};

// Backward elimination: drop the term of smallest |t| while it is below the
// two-sided critical value at alpha, re-estimating after each removal.
// Columns that are linearly dependent on the rest go first.
RefineResult refine_structure(const EstimatedModel& model, const Dataset& data, double alpha = 0.05);

// Per-coefficient t statistics of a least-squares fit over the estimation
// rows, exposed for tests.
std::vector<double> t_statistics(const Dataset& data, const std::vector<Term>& structure, int max_lag);

OutcomeLabel classify_outcome(std::vector<Term> structure, std::vector<Term> truth);

struct OutcomeCounts {
    std::array<std::size_t, 4> counts{};
    std::size_t total = 0;

    std::size_t operator[](OutcomeLabel l) const { return counts[static_cast<std::size_t>(l)]; }
};

OutcomeCounts outcome_table(const std::vector<ArchiveEntry>& archive, const ModelSet& ms,
                            const std::vector<Term>& truth, const Dataset& data, double alpha = 0.05);

struct IcPoint {
    int xi = 0;
    double bic = 0.0;
    double lilc = 0.0;
    double rss = 0.0;
};

inline constexpr double kRssFloor = 1e-300;

// BIC and LILC from one-step estimation residuals; sorted by xi.
std::vector<IcPoint> information_criteria(const std::vector<ArchiveEntry>& archive, const ModelSet& ms,
                                          const Dataset& data);
IcPoint information_criteria(int xi, double rss, std::size_t n);

struct KneeSelection {
    ArchiveEntry top;  // MMD-top archive entry
    RefineResult refined;
};

// MMD-top structure of the archive, fitted and refined.
KneeSelection select_knee(const std::vector<ArchiveEntry>& archive, const ModelSet& ms, const Dataset& data,
                          double alpha = 0.05);

}  // namespace narxmo
