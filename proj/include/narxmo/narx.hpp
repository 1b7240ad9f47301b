#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace narxmo {

enum class Signal : std::uint8_t { output = 0, input = 1 };

// One lagged factor y(k-lag) or u(k-lag).
struct Factor {
    Signal signal = Signal::output;
    int lag = 1;

    friend auto operator<=>(const Factor&, const Factor&) = default;
};

// A monomial in lagged outputs and inputs. The empty product is the constant
// term. Factors are kept sorted, so equal monomials compare equal.
class Term {
public:
    Term() = default;
    explicit Term(std::vector<Factor> factors);

    static Term constant() { return Term{}; }
    static Term y(int lag) { return Term({{Signal::output, lag}}); }
    static Term u(int lag) { return Term({{Signal::input, lag}}); }

    const std::vector<Factor>& factors() const noexcept { return factors_; }
    std::size_t degree() const noexcept { return factors_.size(); }
    bool is_constant() const noexcept { return factors_.empty(); }
    int max_lag() const noexcept;
    // True for a single factor of the given signal kind.
    bool is_linear(Signal s) const noexcept { return degree() == 1 && factors_[0].signal == s; }

    // "1", "y(k-1)", "y(k-1)^2*u(k-2)"
    std::string to_string() const;

    friend Term operator*(const Term& a, const Term& b);
    friend bool operator==(const Term&, const Term&) = default;
    // Degree-major, then lexicographic on the canonical factor list.
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
    std::vector<Factor> factors_;
};

struct ModelSetSpec {
    int n_u = 0;
    int n_y = 0;
    int n_l = 1;

    int max_lag() const noexcept { return n_u > n_y ? n_u : n_y; }
    friend bool operator==(const ModelSetSpec&, const ModelSetSpec&) = default;
};

// Ordered dictionary of candidate terms; index 0 is the constant.
class ModelSet {
public:
    ModelSet(ModelSetSpec spec, std::vector<Term> terms);

    const ModelSetSpec& spec() const noexcept { return spec_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    const Term& operator[](std::size_t i) const { return terms_.at(i); }
    std::optional<std::size_t> index_of(const Term& t) const;

private:
    ModelSetSpec spec_;
    std::vector<Term> terms_;
};

// Closed-form count of monomials of degree <= n_l over n_u + n_y lagged
// variables, constant included: C(n_u + n_y + n_l, n_l).
std::size_t term_count(int n_u, int n_y, int n_l);

ModelSet generate_model_set(int n_u, int n_y, int n_l);

struct Dataset {
    std::vector<double> u;
    std::vector<double> y;
    std::size_t estimation_len = 0;
    std::string name;

    std::size_t size() const noexcept { return y.size(); }
    std::size_t validation_len() const noexcept { return size() - estimation_len; }
    // Throws ArgumentError unless |u| = |y| and 0 < estimation_len < N.
    void validate() const;
};

// Half-open 0-based sample interval [begin, end).
struct Rows {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

// Regressor rows used for estimation and for validation. Both start max_lag
// samples into their partition so every lag is defined inside it.
Rows estimation_rows(const Dataset& data, int max_lag);
Rows validation_rows(const Dataset& data, int max_lag);

struct EstimatedModel {
    std::vector<Term> structure;
    std::vector<double> coefficients;
    ModelSetSpec source;

    std::size_t size() const noexcept { return structure.size(); }
    int max_lag() const noexcept;
};

Eigen::MatrixXd build_regressor(const Dataset& data, std::span<const Term> structure, Rows rows);

struct LeastSquaresSolution {
    Eigen::VectorXd coefficients;
    Eigen::Index rank = 0;
};

// Minimum-residual solution through column-pivoted Householder QR. Columns
// whose pivots fall below max_dim * eps * largest pivot are treated as
// dependent and receive a zero coefficient.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& target);

EstimatedModel estimate_parameters(const Dataset& data, std::span<const Term> structure, ModelSetSpec source);

std::vector<double> simulate_one_step(const EstimatedModel& model, const Dataset& data, Rows rows);

inline constexpr double kDivergenceBound = 1e8;
inline constexpr double kDivergentNmse = 1e6;

struct FreeRun {
    std::vector<double> yhat;  // truncated at the divergence point when divergent
    bool divergent = false;
};

// Output lags before rows.begin are primed with measured samples; later output
// lags use predictions. Stops and flags when |yhat| > 1e8 or non-finite.
FreeRun simulate_free_run(const EstimatedModel& model, const Dataset& data, Rows rows);

// 100 * sqrt(sum (y - yhat)^2 / sum (y - mean y)^2).
double nmse(std::span<const double> y, std::span<const double> yhat);

enum class ErrorMode { free_run, one_step };

// NMSE of the model over the given rows; divergent free runs map to 1e6.
double prediction_nmse(const EstimatedModel& model, const Dataset& data, Rows rows,
                       ErrorMode mode = ErrorMode::free_run);

}  // namespace narxmo
