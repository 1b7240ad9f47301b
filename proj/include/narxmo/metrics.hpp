#pragma once

#include "narxmo/evo_core.hpp"

#include <array>
#include <string>
#include <vector>

namespace narxmo {

using Point2 = std::array<double, 2>;

struct FrontSnapshot {
    std::vector<Point2> points;
    std::string label;
};

// (J1, J2) of every entry.
FrontSnapshot snapshot(const std::vector<ArchiveEntry>& entries, std::string label = {});

// Fraction of B's points dominated by some point of A. Equal points do not
// count.
double coverage(const FrontSnapshot& A, const FrontSnapshot& B);
double delta_coverage(const FrontSnapshot& A, const FrontSnapshot& B);

inline constexpr Point2 kReferencePoint{1.1, 1.1};

struct Normalized {
    std::vector<FrontSnapshot> fronts;
    Point2 reference = kReferencePoint;
    Point2 lower{0, 0};
    Point2 upper{0, 0};
};

// Min-max scaling over the union of all fronts. A constant axis maps to 0.
Normalized normalize_and_reference(const std::vector<FrontSnapshot>& fronts);

// Exact 2-D dominated area (minimization) bounded by r. Dominated points and
// points outside the box contribute nothing.
double hypervolume(const FrontSnapshot& front, Point2 r);

// HV(front) / HV(ideal) with both normalized over their union.
double hv_ratio(const FrontSnapshot& front, const FrontSnapshot& ideal);

// Same ratio for several fronts at once, normalized over the union of all of
// them and the ideal front so the ratios are comparable.
std::vector<double> hv_ratios(const std::vector<FrontSnapshot>& fronts, const FrontSnapshot& ideal);

}  // namespace narxmo
