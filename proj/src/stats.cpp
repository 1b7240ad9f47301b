#include "narxmo/stats.hpp"

#include "narxmo/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace narxmo {

namespace {

// Sum of (t^3 - t) over tie groups.
double tie_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double t = static_cast<double>(j - i);
        s += t * t * t - t;
        i = j;
    }
    return s;
}

double normal_sf(double z) {
    static const boost::math::normal N;
    return boost::math::cdf(boost::math::complement(N, z));
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

std::vector<double> midranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) r[idx[k]] = mid;
        i = j;
    }
    return r;
}

TestReport friedman(const BlockedSamples& samples, RankOrder order) {
    const std::size_t N = samples.size();
    if (N < 2) throw ArgumentError("friedman: need at least two blocks");
    const std::size_t k = samples[0].size();
    if (k < 2) throw ArgumentError("friedman: need at least two treatments");
    TestReport rep;
    rep.test = "friedman";
    rep.n = N;
    rep.mean_ranks.assign(k, 0.0);
    double ties = 0.0;
    for (const auto& row : samples) {
        if (row.size() != k) throw ArgumentError("friedman: ragged sample matrix");
        std::vector<double> v = row;
        for (double x : v)
            if (!std::isfinite(x)) throw ArgumentError("friedman: non-finite sample");
        if (order == RankOrder::largest_first)
            for (auto& x : v) x = -x;
        const auto r = midranks(v);
        for (std::size_t j = 0; j < k; ++j) rep.mean_ranks[j] += r[j];
        ties += tie_sum(v);
    }
    for (auto& r : rep.mean_ranks) r /= static_cast<double>(N);

    const double kd = static_cast<double>(k), Nd = static_cast<double>(N);
    double ss = 0.0;
    for (double r : rep.mean_ranks) ss += r * r;
    double chi = 12.0 * Nd / (kd * (kd + 1.0)) * (ss - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    const double divisor = 1.0 - ties / (Nd * kd * (kd * kd - 1.0));
    if (divisor <= 0) {
        // Every block fully tied.
        rep.statistic = 0.0;
        rep.p_value = 1.0;
        rep.degenerate = true;
        return rep;
    }
    chi = std::max(0.0, chi / divisor);
    rep.statistic = chi;
    boost::math::chi_squared dist(kd - 1.0);
    rep.p_value = clamp01(boost::math::cdf(boost::math::complement(dist, chi)));
    return rep;
}

std::vector<double> hommel_adjust(const std::vector<double>& p) {
    // Same algorithm as R's p.adjust(method = "hommel").
    const std::size_t n = p.size();
    if (n == 0) return {};
    for (double x : p)
        if (!(x >= 0 && x <= 1)) throw ArgumentError("hommel: p-values must lie in [0, 1]");
    if (n == 1) return p;
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    std::vector<double> ps(n);
    for (std::size_t i = 0; i < n; ++i) ps[i] = p[o[i]];

    const double nd = static_cast<double>(n);
    double q0 = INFINITY;
    for (std::size_t i = 0; i < n; ++i) q0 = std::min(q0, nd * ps[i] / static_cast<double>(i + 1));
    std::vector<double> q(n, q0), pa(n, q0);
    for (std::size_t m = n - 1; m >= 2; --m) {
        const double md = static_cast<double>(m);
        // i1 = 1..(n-m+1), i2 = (n-m+2)..n in 1-based indexing.
        const std::size_t n1 = n - m + 1;
        double q1 = INFINITY;
        for (std::size_t k = 2; k <= m; ++k) {
            const std::size_t idx = n - m + k;  // 1-based
            q1 = std::min(q1, md * ps[idx - 1] / static_cast<double>(k));
        }
        for (std::size_t i = 0; i < n1; ++i) q[i] = std::min(md * ps[i], q1);
        for (std::size_t i = n1; i < n; ++i) q[i] = q[n1 - 1];
        for (std::size_t i = 0; i < n; ++i) pa[i] = std::max(pa[i], q[i]);
    }
    for (std::size_t i = 0; i < n; ++i) pa[i] = std::max(pa[i], ps[i]);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[o[i]] = clamp01(pa[i]);
    return out;
}

TestReport hommel_posthoc(const std::vector<double>& mean_ranks, std::size_t n_blocks, std::size_t control,
                          double alpha) {
    const std::size_t k = mean_ranks.size();
    if (k < 2) throw ArgumentError("hommel: need at least two treatments");
    if (n_blocks < 1) throw ArgumentError("hommel: need at least one block");
    if (control >= k) throw ArgumentError("hommel: control index out of range");
    TestReport rep;
    rep.test = "hommel";
    rep.n = n_blocks;
    rep.mean_ranks = mean_ranks;
    const double kd = static_cast<double>(k);
    const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n_blocks)));
    for (std::size_t i = 0; i < k; ++i) {
        if (i == control) continue;
        const double z = (mean_ranks[i] - mean_ranks[control]) / se;
        rep.compared.push_back(i);
        rep.z.push_back(z);
        rep.raw_p.push_back(clamp01(2.0 * normal_sf(std::abs(z))));
    }
    rep.adjusted_p = hommel_adjust(rep.raw_p);
    for (double a : rep.adjusted_p) rep.reject.push_back(a <= alpha);
    rep.statistic = rep.z.empty() ? 0.0 : *std::max_element(rep.z.begin(), rep.z.end());
    rep.p_value = rep.adjusted_p.empty() ? 1.0 : *std::min_element(rep.adjusted_p.begin(), rep.adjusted_p.end());
    return rep;
}

Alternative parse_alternative(const std::string& s) {
    if (s == "greater") return Alternative::greater;
    if (s == "two_sided") return Alternative::two_sided;
    throw ArgumentError("unknown alternative '" + s + "'");
}

std::string to_string(Alternative a) { return a == Alternative::greater ? "greater" : "two_sided"; }

TestReport wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y, Alternative alt) {
    if (x.size() != y.size()) throw ArgumentError("wilcoxon: samples must be paired");
    TestReport rep;
    rep.test = "wilcoxon";
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i] - y[i];
        if (!std::isfinite(v)) throw ArgumentError("wilcoxon: non-finite sample");
        if (v != 0.0) d.push_back(v);
    }
    rep.n = d.size();
    if (d.empty()) {
        rep.degenerate = true;
        return rep;
    }
    if (d.size() < 6) throw ArgumentError("wilcoxon: need at least six non-zero differences");

    std::vector<double> a(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) a[i] = std::abs(d[i]);
    const auto r = midranks(a);
    double wplus = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0) wplus += r[i];
    const double n = static_cast<double>(d.size());
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_sum(a) / 48.0;
    rep.statistic = wplus;
    if (!(var > 0)) {
        rep.degenerate = true;
        return rep;
    }
    const double sd = std::sqrt(var);
    if (alt == Alternative::greater) {
        const double z = (wplus - mean - 0.5) / sd;
        rep.z = {z};
        rep.p_value = clamp01(normal_sf(z));
    } else {
        const double diff = std::abs(wplus - mean);
        const double z = std::max(0.0, diff - 0.5) / sd;
        rep.z = {(wplus - mean) >= 0 ? z : -z};
        rep.p_value = clamp01(2.0 * normal_sf(z));
    }
    rep.reject = {rep.p_value <= 0.05};
    return rep;
}

}  // namespace narxmo
