#include "narxmo/narx.hpp"

#include "narxmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace narxmo {

Term::Term(std::vector<Factor> factors) : factors_(std::move(factors)) {
    for (const auto& f : factors_)
        if (f.lag < 1) throw ArgumentError("term lag must be >= 1");
    std::sort(factors_.begin(), factors_.end());
}

int Term::max_lag() const noexcept {
    int m = 0;
    for (const auto& f : factors_) m = std::max(m, f.lag);
    return m;
}

std::string Term::to_string() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < factors_.size();) {
        std::size_t j = i;
        while (j < factors_.size() && factors_[j] == factors_[i]) ++j;
        if (!out.empty()) out += '*';
        out += factors_[i].signal == Signal::output ? "y(k-" : "u(k-";
        out += std::to_string(factors_[i].lag) + ")";
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

Term operator*(const Term& a, const Term& b) {
    std::vector<Factor> f = a.factors_;
    f.insert(f.end(), b.factors_.begin(), b.factors_.end());
    return Term(std::move(f));
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.factors_.begin(), a.factors_.end(), b.factors_.begin(),
                                                  b.factors_.end());
}

ModelSet::ModelSet(ModelSetSpec spec, std::vector<Term> terms) : spec_(spec), terms_(std::move(terms)) {}

std::optional<std::size_t> ModelSet::index_of(const Term& t) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), t);
    if (it == terms_.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - terms_.begin());
}

std::size_t term_count(int n_u, int n_y, int n_l) {
    // C(n0 + n_l, n_l) evaluated incrementally; every partial product is exact.
    const std::size_t n0 = static_cast<std::size_t>(n_u + n_y);
    std::size_t c = 1;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(n_l); ++i) c = c * (n0 + i) / i;
    return c;
}

ModelSet generate_model_set(int n_u, int n_y, int n_l) {
    if (n_u < 0 || n_y < 0 || n_l < 1 || n_u + n_y < 1)
        throw ArgumentError("model set requires n_u >= 0, n_y >= 0, n_l >= 1, n_u + n_y >= 1");

    std::vector<Factor> vars;
    for (int l = 1; l <= n_y; ++l) vars.push_back({Signal::output, l});
    for (int l = 1; l <= n_u; ++l) vars.push_back({Signal::input, l});
    const int nv = static_cast<int>(vars.size());

    std::vector<Term> terms;
    terms.reserve(term_count(n_u, n_y, n_l));
    terms.emplace_back();
    // Non-decreasing index tuples enumerate each monomial once, already in
    // canonical factor order and lexicographic within a degree.
    for (int d = 1; d <= n_l; ++d) {
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        while (true) {
            std::vector<Factor> f;
            f.reserve(idx.size());
            for (int i : idx) f.push_back(vars[static_cast<std::size_t>(i)]);
            terms.emplace_back(std::move(f));

            int pos = d - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == nv - 1) --pos;
            if (pos < 0) break;
            const int v = idx[static_cast<std::size_t>(pos)] + 1;
            for (int i = pos; i < d; ++i) idx[static_cast<std::size_t>(i)] = v;
        }
    }
    return ModelSet({n_u, n_y, n_l}, std::move(terms));
}

void Dataset::validate() const {
    if (u.size() != y.size()) throw ArgumentError("dataset: |u| != |y|");
    if (estimation_len == 0 || estimation_len >= y.size())
        throw ArgumentError("dataset: estimation length must satisfy 0 < len < N");
}

Rows estimation_rows(const Dataset& data, int max_lag) {
    return {static_cast<std::size_t>(max_lag), data.estimation_len};
}

Rows validation_rows(const Dataset& data, int max_lag) {
    return {data.estimation_len + static_cast<std::size_t>(max_lag), data.size()};
}

int EstimatedModel::max_lag() const noexcept {
    int m = source.max_lag();
    for (const auto& t : structure) m = std::max(m, t.max_lag());
    return m;
}

namespace {

inline double term_value(const Term& t, std::span<const double> yv, std::span<const double> uv, std::size_t k) {
    double v = 1.0;
    for (const auto& f : t.factors()) {
        const auto idx = k - static_cast<std::size_t>(f.lag);
        v *= f.signal == Signal::output ? yv[idx] : uv[idx];
    }
    return v;
}

int structure_max_lag(std::span<const Term> structure) {
    int m = 0;
    for (const auto& t : structure) m = std::max(m, t.max_lag());
    return m;
}

void check_rows(const Dataset& data, Rows rows, int lag) {
    if (rows.begin < static_cast<std::size_t>(lag)) throw ArgumentError("row range under-runs the available lags");
    if (rows.end > data.size() || rows.begin > rows.end) throw ArgumentError("row range exceeds the dataset");
}

}  // namespace

Eigen::MatrixXd build_regressor(const Dataset& data, std::span<const Term> structure, Rows rows) {
    check_rows(data, rows, structure_max_lag(structure));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(structure.size()));
    for (std::size_t j = 0; j < structure.size(); ++j)
        for (std::size_t k = rows.begin; k < rows.end; ++k)
            X(static_cast<Eigen::Index>(k - rows.begin), static_cast<Eigen::Index>(j)) =
                term_value(structure[j], data.y, data.u, k);
    return X;
}

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& target) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.rows(), X.cols());
    const double max_dim = static_cast<double>(std::max(X.rows(), X.cols()));
    qr.setThreshold(max_dim * std::numeric_limits<double>::epsilon());
    qr.compute(X);
    LeastSquaresSolution s;
    s.rank = qr.rank();
    if (s.rank == 0) {
        s.coefficients = Eigen::VectorXd::Zero(X.cols());
        return s;
    }
    s.coefficients = qr.solve(target);
    return s;
}

EstimatedModel estimate_parameters(const Dataset& data, std::span<const Term> structure, ModelSetSpec source) {
    if (structure.empty()) throw ArgumentError("cannot estimate an empty structure");
    data.validate();
    const int lag = std::max(source.max_lag(), structure_max_lag(structure));
    const Rows rows = estimation_rows(data, lag);
    if (rows.size() < structure.size()) throw ArgumentError("fewer estimation rows than terms");

    const Eigen::MatrixXd X = build_regressor(data, structure, rows);
    const Eigen::VectorXd target =
        Eigen::Map<const Eigen::VectorXd>(data.y.data() + rows.begin, static_cast<Eigen::Index>(rows.size()));
    const auto sol = solve_least_squares(X, target);

    EstimatedModel m;
    m.structure.assign(structure.begin(), structure.end());
    m.coefficients.assign(sol.coefficients.data(), sol.coefficients.data() + sol.coefficients.size());
    m.source = source;
    return m;
}

std::vector<double> simulate_one_step(const EstimatedModel& model, const Dataset& data, Rows rows) {
    check_rows(data, rows, structure_max_lag(model.structure));
    std::vector<double> out(rows.size());
    for (std::size_t k = rows.begin; k < rows.end; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < model.structure.size(); ++j)
            acc += model.coefficients[j] * term_value(model.structure[j], data.y, data.u, k);
        out[k - rows.begin] = acc;
    }
    return out;
}

FreeRun simulate_free_run(const EstimatedModel& model, const Dataset& data, Rows rows) {
    check_rows(data, rows, structure_max_lag(model.structure));
    // Buffer holds measured outputs for priming and predictions afterwards.
    std::vector<double> buf(data.y.begin(), data.y.begin() + static_cast<std::ptrdiff_t>(rows.end));
    FreeRun r;
    r.yhat.reserve(rows.size());
    for (std::size_t k = rows.begin; k < rows.end; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < model.structure.size(); ++j)
            acc += model.coefficients[j] * term_value(model.structure[j], buf, data.u, k);
        if (!std::isfinite(acc) || std::abs(acc) > kDivergenceBound) {
            r.divergent = true;
            return r;
        }
        buf[k] = acc;
        r.yhat.push_back(acc);
    }
    return r;
}

double nmse(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw ArgumentError("nmse: length mismatch");
    if (y.size() < 2) throw ArgumentError("nmse: need at least two samples");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        num += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        den += (y[i] - mean) * (y[i] - mean);
    }
    if (!(den > 0.0)) throw DegenerateDataError("nmse: measured output is constant");
    const double v = 100.0 * std::sqrt(num / den);
    return std::isfinite(v) ? v : kDivergentNmse;
}

double prediction_nmse(const EstimatedModel& model, const Dataset& data, Rows rows, ErrorMode mode) {
    std::span<const double> measured(data.y.data() + rows.begin, rows.size());
    if (mode == ErrorMode::one_step) return nmse(measured, simulate_one_step(model, data, rows));
    const FreeRun fr = simulate_free_run(model, data, rows);
    if (fr.divergent) return kDivergentNmse;
    return nmse(measured, fr.yhat);
}

}  // namespace narxmo
