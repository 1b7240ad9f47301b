#include "narxmo/mcdm.hpp"

#include "narxmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace narxmo {

void PreferenceSpec::validate() const {
    const std::size_t m = objective_ranks.size();
    if (m < 2) throw ArgumentError("preference: need at least two objectives");
    std::vector<int> sorted = objective_ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < m; ++i)
        if (sorted[i] != static_cast<int>(i + 1))
            throw ArgumentError("preference: objective_ranks must be a permutation of 1..m");
    if (!(intensity >= 1.0 && intensity <= 9.0)) throw ArgumentError("preference: intensity must lie in [1, 9]");
}

std::vector<double> preference_weights_raw(const PreferenceSpec& spec) {
    spec.validate();
    const auto& O = spec.objective_ranks;
    const double m = static_cast<double>(O.size());
    std::vector<double> w(O.size());
    for (std::size_t i = 0; i < O.size(); ++i) {
        // Sum exponents rather than multiplying powers.
        double e = 0.0;
        for (std::size_t j = 0; j < O.size(); ++j) e += (O[j] - O[i]) / (m - 1.0);
        w[i] = std::pow(spec.intensity, e / m);
    }
    return w;
}

std::vector<double> preference_weights(const PreferenceSpec& spec) {
    auto w = preference_weights_raw(spec);
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= s;
    return w;
}

McdmMethod parse_mcdm_method(const std::string& s) {
    if (s == "mmd") return McdmMethod::mmd;
    if (s == "mtd") return McdmMethod::mtd;
    throw ArgumentError("unknown MCDM method '" + s + "'");
}

std::string to_string(McdmMethod m) { return m == McdmMethod::mmd ? "mmd" : "mtd"; }

namespace {

std::vector<ArchiveEntry> clean(const std::vector<ArchiveEntry>& front) {
    std::vector<ArchiveEntry> out;
    for (std::size_t i = 0; i < front.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < front.size() && keep; ++j) {
            if (dominates(front[j].objectives, front[i].objectives)) keep = false;
            if (j < i && front[j].genome == front[i].genome) keep = false;
        }
        if (keep) out.push_back(front[i]);
    }
    return out;
}

bool parsimony_less(const RankedEntry& a, const RankedEntry& b) {
    if (a.objectives.xi != b.objectives.xi) return a.objectives.xi < b.objectives.xi;
    if (a.objectives.nmse != b.objectives.nmse) return a.objectives.nmse < b.objectives.nmse;
    return a.genome < b.genome;
}

}  // namespace

RankedFront mmd_rank(const std::vector<ArchiveEntry>& front) {
    if (front.empty()) throw ArgumentError("mmd_rank: empty front");
    const auto pts = clean(front);
    double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
    for (const auto& e : pts) {
        const double v[2] = {e.objectives.j1, e.objectives.j2};
        for (int p = 0; p < 2; ++p) {
            lo[p] = std::min(lo[p], v[p]);
            hi[p] = std::max(hi[p], v[p]);
        }
    }
    RankedFront rf;
    rf.method = McdmMethod::mmd;
    for (const auto& e : pts) {
        const double v[2] = {e.objectives.j1, e.objectives.j2};
        double d = 0.0;
        for (int p = 0; p < 2; ++p)
            if (hi[p] > lo[p]) d += std::abs(v[p] - lo[p]) / (hi[p] - lo[p]);
        rf.entries.push_back({e.genome, e.objectives, d});
    }
    std::sort(rf.entries.begin(), rf.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score < b.score;
        return parsimony_less(a, b);
    });
    return rf;
}

std::vector<std::array<double, 2>> tournament_scores(const std::vector<ArchiveEntry>& front) {
    const std::size_t n = front.size();
    if (n < 2) throw ArgumentError("tournament needs at least two structures");
    std::vector<std::array<double, 2>> T(n, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (front[j].objectives.j1 > front[i].objectives.j1) T[i][0] += 1;
            if (front[j].objectives.j2 > front[i].objectives.j2) T[i][1] += 1;
        }
        T[i][0] /= static_cast<double>(n - 1);
        T[i][1] /= static_cast<double>(n - 1);
    }
    return T;
}

RankedFront mtd_rank(const std::vector<ArchiveEntry>& front, const std::vector<double>& w) {
    if (w.size() != 2) throw ArgumentError("mtd_rank: weight vector must have two components");
    if (front.size() < 2) throw ArgumentError("mtd_rank: tournament needs at least two structures");
    const auto pts = clean(front);
    // A lone survivor of the dominance filter beats everything it was compared with.
    const auto T = pts.size() > 1 ? tournament_scores(pts) : std::vector<std::array<double, 2>>{{1.0, 1.0}};
    RankedFront rf;
    rf.method = McdmMethod::mtd;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double r = 1.0;
        for (int p = 0; p < 2; ++p) {
            // 0^0 is taken as 1: a zero-weight objective does not veto.
            if (w[p] > 0) r *= std::pow(T[i][p], w[p]);
        }
        rf.entries.push_back({pts[i].genome, pts[i].objectives, std::sqrt(r)});
    }
    std::sort(rf.entries.begin(), rf.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return parsimony_less(a, b);
    });
    return rf;
}

}  // namespace narxmo
