#include "narxmo/frf.hpp"

#include "narxmo/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace narxmo {

double LinearFRF::magnitude_db(std::size_t i) const { return 20.0 * std::log10(std::abs(response.at(i))); }

double LinearFRF::peak_frequency() const {
    if (response.empty()) throw ArgumentError("empty frequency response");
    std::size_t best = 0;
    for (std::size_t i = 1; i < response.size(); ++i)
        if (std::abs(response[i]) > std::abs(response[best])) best = i;
    return frequencies[best];
}

std::vector<double> frequency_grid(double fs, std::size_t n) {
    if (!(fs > 0)) throw ArgumentError("sampling rate must be positive");
    if (n < 2) throw ArgumentError("frequency grid needs at least two points");
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = 0.5 * fs * static_cast<double>(i) / static_cast<double>(n - 1);
    return f;
}

LinearPart linear_part(const EstimatedModel& model) {
    if (model.coefficients.size() != model.structure.size())
        throw ArgumentError("model has mismatched structure and coefficients");
    LinearPart lp;
    for (std::size_t i = 0; i < model.structure.size(); ++i) {
        const Term& t = model.structure[i];
        if (t.degree() != 1) continue;
        const auto& f = t.factors()[0];
        auto& v = f.signal == Signal::output ? lp.a : lp.b;
        const auto idx = static_cast<std::size_t>(f.lag - 1);
        if (v.size() <= idx) v.resize(idx + 1, 0.0);
        v[idx] += model.coefficients[i];
    }
    return lp;
}

std::complex<double> evaluate_h1(const LinearPart& lp, double f, double fs) {
    const double w = 2.0 * std::numbers::pi * f / fs;
    std::complex<double> num = 0.0, den = 1.0;
    for (std::size_t i = 0; i < lp.b.size(); ++i) num += lp.b[i] * std::polar(1.0, -w * static_cast<double>(i + 1));
    for (std::size_t i = 0; i < lp.a.size(); ++i) den -= lp.a[i] * std::polar(1.0, -w * static_cast<double>(i + 1));
    return num / den;
}

LinearFRF linear_frf(const EstimatedModel& model, double fs, const std::vector<double>& grid) {
    if (!(fs > 0)) throw ArgumentError("sampling rate must be positive");
    const LinearPart lp = linear_part(model);
    LinearFRF out;
    out.fs = fs;
    out.frequencies = grid;
    bool any_b = false;
    for (double b : lp.b) any_b = any_b || b != 0.0;
    out.degenerate = !any_b;
    out.response.reserve(grid.size());
    for (double f : grid) out.response.push_back(evaluate_h1(lp, f, fs));
    return out;
}

LinearFRF linear_frf(const EstimatedModel& model, double fs) {
    return linear_frf(model, fs, frequency_grid(fs));
}

std::optional<double> resonance_from_poles(const EstimatedModel& model, double fs) {
    if (!(fs > 0)) throw ArgumentError("sampling rate must be positive");
    auto a = linear_part(model).a;
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    if (a.size() < 2) return std::nullopt;
    // Companion matrix of z^n - a1 z^(n-1) - ... - an.
    const auto n = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) C(0, j) = a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    const Eigen::VectorXcd poles = Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues();

    std::optional<std::complex<double>> best;
    for (const auto& p : poles) {
        if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) continue;
        if (!best || std::abs(p) > std::abs(*best)) best = p;
    }
    if (!best) return std::nullopt;
    return std::abs(std::arg(*best)) * fs / (2.0 * std::numbers::pi);
}

}  // namespace narxmo
