#pragma once

#include <string>
#include <vector>

namespace narxmo {

// rows = blocks (systems), columns = treatments (algorithms)
using BlockedSamples = std::vector<std::vector<double>>;

enum class RankOrder {
    smallest_first,  // smallest value gets rank 1
    largest_first,   // e.g. hypervolume, where larger is better
};

struct TestReport {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<double> mean_ranks;
    // Post-hoc only: one entry per non-control treatment, in treatment order.
    std::vector<std::size_t> compared;
    std::vector<double> z;
    std::vector<double> raw_p;
    std::vector<double> adjusted_p;
    std::vector<bool> reject;
    bool degenerate = false;
    std::size_t n = 0;  // blocks, or non-zero pairs for Wilcoxon
};

// Midranks of v (1-based).
std::vector<double> midranks(const std::vector<double>& v);

TestReport friedman(const BlockedSamples& samples, RankOrder order = RankOrder::smallest_first);

// Hommel adjusted p-values for a family of raw p-values (any order).
std::vector<double> hommel_adjust(const std::vector<double>& p);

TestReport hommel_posthoc(const std::vector<double>& mean_ranks, std::size_t n_blocks, std::size_t control,
                          double alpha = 0.05);

enum class Alternative { greater, two_sided };
Alternative parse_alternative(const std::string& s);
std::string to_string(Alternative a);

TestReport wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y,
                                Alternative alt = Alternative::greater);

}  // namespace narxmo
