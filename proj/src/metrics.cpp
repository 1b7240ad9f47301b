#include "narxmo/metrics.hpp"

#include "narxmo/error.hpp"

#include <algorithm>
#include <cmath>

namespace narxmo {

FrontSnapshot snapshot(const std::vector<ArchiveEntry>& entries, std::string label) {
    FrontSnapshot s;
    s.label = std::move(label);
    s.points.reserve(entries.size());
    for (const auto& e : entries) s.points.push_back({e.objectives.j1, e.objectives.j2});
    return s;
}

double coverage(const FrontSnapshot& A, const FrontSnapshot& B) {
    if (B.points.empty()) throw ArgumentError("coverage: second set is empty");
    std::size_t hit = 0;
    for (const auto& b : B.points) {
        for (const auto& a : A.points) {
            if (dominates(a[0], a[1], b[0], b[1])) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(B.points.size());
}

double delta_coverage(const FrontSnapshot& A, const FrontSnapshot& B) { return coverage(A, B) - coverage(B, A); }

Normalized normalize_and_reference(const std::vector<FrontSnapshot>& fronts) {
    Normalized out;
    Point2 lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
    for (const auto& f : fronts)
        for (const auto& p : f.points)
            for (int k = 0; k < 2; ++k) {
                if (!std::isfinite(p[k])) throw ArgumentError("normalize: non-finite objective value");
                lo[k] = std::min(lo[k], p[k]);
                hi[k] = std::max(hi[k], p[k]);
            }
    out.lower = lo;
    out.upper = hi;
    for (const auto& f : fronts) {
        FrontSnapshot n;
        n.label = f.label;
        for (const auto& p : f.points) {
            Point2 q{};
            for (int k = 0; k < 2; ++k) q[k] = hi[k] > lo[k] ? (p[k] - lo[k]) / (hi[k] - lo[k]) : 0.0;
            n.points.push_back(q);
        }
        out.fronts.push_back(std::move(n));
    }
    return out;
}

double hypervolume(const FrontSnapshot& front, Point2 r) {
    std::vector<Point2> pts;
    for (const auto& p : front.points)
        if (p[0] < r[0] && p[1] < r[1]) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    // Staircase of points that improve the running J2 minimum, then sweep.
    std::vector<Point2> stair;
    for (const auto& p : pts)
        if (stair.empty() || p[1] < stair.back()[1]) stair.push_back(p);
    double area = 0.0;
    for (std::size_t i = 0; i < stair.size(); ++i) {
        const double next1 = i + 1 < stair.size() ? stair[i + 1][0] : r[0];
        area += (next1 - stair[i][0]) * (r[1] - stair[i][1]);
    }
    return area;
}

double hv_ratio(const FrontSnapshot& front, const FrontSnapshot& ideal) {
    const auto n = normalize_and_reference({front, ideal});
    const double hi = hypervolume(n.fronts[1], n.reference);
    if (!(hi > 0)) throw DegenerateDataError("hv_ratio: ideal front has zero hypervolume");
    return hypervolume(n.fronts[0], n.reference) / hi;
}

std::vector<double> hv_ratios(const std::vector<FrontSnapshot>& fronts, const FrontSnapshot& ideal) {
    std::vector<FrontSnapshot> all = fronts;
    all.push_back(ideal);
    const auto n = normalize_and_reference(all);
    const double hi = hypervolume(n.fronts.back(), n.reference);
    if (!(hi > 0)) throw DegenerateDataError("hv_ratio: ideal front has zero hypervolume");
    std::vector<double> out;
    out.reserve(fronts.size());
    for (std::size_t i = 0; i < fronts.size(); ++i) out.push_back(hypervolume(n.fronts[i], n.reference) / hi);
    return out;
}

}  // namespace narxmo
