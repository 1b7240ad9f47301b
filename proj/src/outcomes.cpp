#include "narxmo/outcomes.hpp"

#include "narxmo/error.hpp"
#include "narxmo/mcdm.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace narxmo {

std::string to_string(OutcomeLabel l) {
    switch (l) {
        case OutcomeLabel::exact_fitting: return "exact_fitting";
        case OutcomeLabel::over_fitting: return "over_fitting";
        case OutcomeLabel::under_fitting_1: return "under_fitting_1";
        case OutcomeLabel::under_fitting_2: return "under_fitting_2";
    }
    return "?";
}

namespace {

int lag_of(const std::vector<Term>& s, int base) {
    int m = base;
    for (const auto& t : s) m = std::max(m, t.max_lag());
    return m;
}

struct Fit {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

Fit regression(const Dataset& data, const std::vector<Term>& structure, int max_lag) {
    const Rows rows = estimation_rows(data, max_lag);
    Fit f;
    f.X = build_regressor(data, structure, rows);
    f.y = Eigen::Map<const Eigen::VectorXd>(data.y.data() + rows.begin, static_cast<Eigen::Index>(rows.size()));
    return f;
}

double rss_of(const Fit& f) {
    const auto sol = solve_least_squares(f.X, f.y);
    return (f.y - f.X * sol.coefficients).squaredNorm();
}

}  // namespace

std::vector<double> t_statistics(const Dataset& data, const std::vector<Term>& structure, int max_lag) {
    const Fit f = regression(data, structure, max_lag);
    const auto n = f.X.rows(), p = f.X.cols();
    if (n <= p) throw ArgumentError("t statistics need more estimation rows than terms");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(f.X);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    const Eigen::VectorXd beta = qr.solve(f.y);
    const double rss = (f.y - f.X * beta).squaredNorm();
    // Floor the residual variance at a tiny fraction of the output power so
    // that exact (noise-free) fits give finite statistics.
    const double floor = 1e-20 * f.y.squaredNorm() / static_cast<double>(n);
    const double s2 = std::max(rss / static_cast<double>(n - p), floor);
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    std::vector<double> t(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        const double se = std::sqrt(s2 * Rinv.row(j).squaredNorm());
        t[static_cast<std::size_t>(j)] = se > 0 && std::isfinite(se) ? beta(j) / se : 0.0;
    }
    return t;
}

RefineResult refine_structure(const EstimatedModel& model, const Dataset& data, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw ArgumentError("refine: alpha must lie in (0, 1)");
    data.validate();
    RefineResult res;
    std::vector<Term> s = model.structure;
    const int lag = lag_of(s, model.source.max_lag());

    auto drop = [&](std::size_t j) {
        res.removed.push_back(s[j]);
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(j));
    };

    while (!s.empty()) {
        const Fit f = regression(data, s, lag);
        if (f.X.rows() <= f.X.cols()) throw ArgumentError("refine: need more estimation rows than terms");
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> cqr(f.X);
        cqr.setThreshold(static_cast<double>(std::max(f.X.rows(), f.X.cols())) *
                         std::numeric_limits<double>::epsilon());
        if (cqr.rank() < f.X.cols()) {
            // The last pivoted column is the one best explained by the others.
            drop(static_cast<std::size_t>(cqr.colsPermutation().indices()(f.X.cols() - 1)));
            continue;
        }
        const auto t = t_statistics(data, s, lag);
        boost::math::students_t dist(static_cast<double>(f.X.rows() - f.X.cols()));
        const double crit = boost::math::quantile(boost::math::complement(dist, alpha / 2));
        std::size_t worst = 0;
        for (std::size_t j = 1; j < t.size(); ++j)
            if (std::abs(t[j]) < std::abs(t[worst])) worst = j;
        if (std::abs(t[worst]) >= crit) break;
        drop(worst);
    }

    res.model.source = model.source;
    res.degenerate = s.empty();
    if (!s.empty()) res.model = estimate_parameters(data, s, model.source);
    return res;
}

OutcomeLabel classify_outcome(std::vector<Term> structure, std::vector<Term> truth) {
    std::sort(structure.begin(), structure.end());
    structure.erase(std::unique(structure.begin(), structure.end()), structure.end());
    std::sort(truth.begin(), truth.end());
    truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
    const bool has_all = std::includes(structure.begin(), structure.end(), truth.begin(), truth.end());
    const bool no_spur = std::includes(truth.begin(), truth.end(), structure.begin(), structure.end());
    if (has_all && no_spur) return OutcomeLabel::exact_fitting;
    if (has_all) return OutcomeLabel::over_fitting;
    if (no_spur) return OutcomeLabel::under_fitting_1;
    return OutcomeLabel::under_fitting_2;
}

OutcomeCounts outcome_table(const std::vector<ArchiveEntry>& archive, const ModelSet& ms,
                            const std::vector<Term>& truth, const Dataset& data, double alpha) {
    OutcomeCounts c;
    for (const auto& e : archive) {
        const auto s = decode(e.genome, ms);
        const auto refined = refine_structure(estimate_parameters(data, s, ms.spec()), data, alpha);
        ++c.counts[static_cast<std::size_t>(classify_outcome(refined.model.structure, truth))];
        ++c.total;
    }
    return c;
}

IcPoint information_criteria(int xi, double rss, std::size_t n) {
    if (n < 3) throw ArgumentError("information criteria need at least three samples");
    const double N = static_cast<double>(n);
    const double fit = N * std::log(std::max(rss, kRssFloor) / N);
    return {xi, fit + xi * std::log(N), fit + 2.0 * xi * std::log(std::log(N)), rss};
}

std::vector<IcPoint> information_criteria(const std::vector<ArchiveEntry>& archive, const ModelSet& ms,
                                          const Dataset& data) {
    data.validate();
    std::vector<IcPoint> out;
    const int lag = ms.spec().max_lag();
    for (const auto& e : archive) {
        const auto s = decode(e.genome, ms);
        const Fit f = regression(data, s, lag_of(s, lag));
        out.push_back(information_criteria(static_cast<int>(s.size()), rss_of(f), static_cast<std::size_t>(f.X.rows())));
    }
    std::stable_sort(out.begin(), out.end(), [](const IcPoint& a, const IcPoint& b) { return a.xi < b.xi; });
    return out;
}

KneeSelection select_knee(const std::vector<ArchiveEntry>& archive, const ModelSet& ms, const Dataset& data,
                          double alpha) {
    const auto ranked = mmd_rank(archive);
    KneeSelection k;
    k.top = {ranked.entries.front().genome, ranked.entries.front().objectives};
    const auto s = decode(k.top.genome, ms);
    k.refined = refine_structure(estimate_parameters(data, s, ms.spec()), data, alpha);
    return k;
}

}  // namespace narxmo
