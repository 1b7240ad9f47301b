#include "doctest.h"
#include "helpers.hpp"

#include "narxmo/error.hpp"
#include "narxmo/narx.hpp"

#include <cmath>
#include <functional>
#include <set>

using namespace narxmo;

namespace {

// Counts distinct monomials by enumerating multisets of lagged variables.
std::size_t brute_force_count(int n_u, int n_y, int n_l) {
    std::vector<Factor> vars;
    for (int l = 1; l <= n_y; ++l) vars.push_back({Signal::output, l});
    for (int l = 1; l <= n_u; ++l) vars.push_back({Signal::input, l});
    std::set<std::vector<Factor>> seen;
    std::vector<Factor> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        seen.insert(cur);
        if (static_cast<int>(cur.size()) == n_l) return;
        for (std::size_t i = from; i < vars.size(); ++i) {
            cur.push_back(vars[i]);
            rec(i);
            cur.pop_back();
        }
    };
    rec(0);
    return seen.size();
}

}  // namespace

TEST_CASE("model set sizes") {
    CHECK(generate_model_set(4, 4, 3).size() == 165);
    CHECK(generate_model_set(5, 5, 3).size() == 286);
    const auto small = generate_model_set(1, 1, 1);
    REQUIRE(small.size() == 3);
    CHECK(small[0].is_constant());
    CHECK(small[1] == Term::y(1));
    CHECK(small[2] == Term::u(1));
}

TEST_CASE("term count matches brute-force enumeration") {
    for (int nu = 0; nu <= 6; ++nu)
        for (int ny = 0; ny <= 6; ++ny)
            for (int nl = 1; nl <= 4; ++nl) {
                if (nu + ny < 1) continue;
                CAPTURE(nu);
                CAPTURE(ny);
                CAPTURE(nl);
                const auto ms = generate_model_set(nu, ny, nl);
                CHECK(ms.size() == term_count(nu, ny, nl));
                CHECK(ms.size() == brute_force_count(nu, ny, nl));
                std::set<Term> distinct(ms.terms().begin(), ms.terms().end());
                CHECK(distinct.size() == ms.size());
                CHECK(ms[0].is_constant());
            }
}

TEST_CASE("model set ordering is degree-major") {
    const auto ms = generate_model_set(2, 2, 2);
    for (std::size_t i = 1; i < ms.size(); ++i) CHECK(ms[i - 1] < ms[i]);
}

TEST_CASE("invalid model set bounds") {
    CHECK_THROWS_AS(generate_model_set(0, 0, 2), ArgumentError);
    CHECK_THROWS_AS(generate_model_set(1, 1, 0), ArgumentError);
    CHECK_THROWS_AS(generate_model_set(-1, 2, 2), ArgumentError);
}

TEST_CASE("term canonical form") {
    CHECK(Term::u(2) * Term::y(1) == Term::y(1) * Term::u(2));
    CHECK((Term::y(1) * Term::y(1) * Term::u(2)).to_string() == "y(k-1)^2*u(k-2)");
    CHECK(Term::constant().to_string() == "1");
}

TEST_CASE("regressor entries") {
    // at k = 3: y(k-1) = 2, u(k-2) = 3
    auto d = test::make_dataset({0, 3, 0, 0, 0, 0}, {0, 0, 2, 0, 0, 0}, 5);
    const std::vector<Term> s{Term::y(1) * Term::u(2)};
    const auto X = build_regressor(d, s, Rows{3, 4});
    CHECK(X(0, 0) == doctest::Approx(6.0));

    const std::vector<Term> c{Term::constant()};
    auto ten = test::make_dataset(std::vector<double>(12, 1.0), std::vector<double>(12, 1.0), 11);
    const auto ones = build_regressor(ten, c, Rows{2, 12});
    CHECK(ones.rows() == 10);
    CHECK(ones.cols() == 1);
    CHECK((ones.array() == 1.0).all());

    CHECK_THROWS_AS(build_regressor(d, s, Rows{1, 4}), ArgumentError);
}

TEST_CASE("regressor on a toy series by hand") {
    // y(k-1), y(k-3), y(k-2)u(k-2)
    auto d = test::make_dataset({1, 2, 3, 4, 5}, {0.5, -1, 2, 0.25, 3}, 4);
    const std::vector<Term> s{Term::y(1), Term::y(3), Term::y(2) * Term::u(2)};
    const auto X = build_regressor(d, s, Rows{3, 5});
    // k = 3: y2 = 2, y0 = 0.5, y1*u1 = -1*2
    CHECK(X(0, 0) == 2.0);
    CHECK(X(0, 1) == 0.5);
    CHECK(X(0, 2) == -2.0);
    // k = 4: y3 = 0.25, y1 = -1, y2*u2 = 2*3
    CHECK(X(1, 0) == 0.25);
    CHECK(X(1, 1) == -1.0);
    CHECK(X(1, 2) == 6.0);
}

TEST_CASE("least squares recovers S6 coefficients on noise-free data") {
    const auto d = test::noise_free(SystemId::S6);
    const auto truth = true_structure(SystemId::S6);
    const auto m = estimate_parameters(d, truth, {4, 4, 3});
    const std::vector<double> expect{0.5, 0.3, 0.3, 0.5};
    REQUIRE(m.coefficients.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(m.coefficients[i] == doctest::Approx(expect[i]).epsilon(1e-6));

    // One-step residual is essentially zero.
    const auto rows = estimation_rows(d, 4);
    const auto yhat = simulate_one_step(m, d, rows);
    double ss = 0;
    for (std::size_t k = rows.begin; k < rows.end; ++k) ss += std::pow(d.y[k] - yhat[k - rows.begin], 2);
    CHECK(std::sqrt(ss / static_cast<double>(rows.size())) <= 1e-8);
}

TEST_CASE("constant output with the constant term") {
    auto d = test::make_dataset(std::vector<double>(50, 0.3), std::vector<double>(50, 2.5), 40);
    const std::vector<Term> c{Term::constant()};
    const auto m = estimate_parameters(d, c, {1, 1, 1});
    CHECK(m.coefficients[0] == doctest::Approx(2.5));
    const auto yhat = simulate_one_step(m, d, Rows{1, 40});
    for (double v : yhat) CHECK(v == doctest::Approx(2.5));
}

TEST_CASE("empty structure and too few rows") {
    auto d = test::make_dataset(std::vector<double>(10, 1), std::vector<double>(10, 1), 5);
    CHECK_THROWS_AS(estimate_parameters(d, std::vector<Term>{}, {1, 1, 1}), ArgumentError);
    const auto ms = generate_model_set(1, 1, 3);
    CHECK_THROWS_AS(estimate_parameters(d, ms.terms(), {1, 1, 3}), ArgumentError);
}

TEST_CASE("collinear columns match the pseudo-inverse fit") {
    Rng rng(5);
    std::vector<double> u(200), y(200);
    for (auto& v : u) v = rng.uniform(-1, 1);
    for (std::size_t k = 1; k < 200; ++k) y[k] = 0.4 * y[k - 1] + u[k - 1] + 0.05 * rng.normal();
    auto d = test::make_dataset(u, y, 150);
    // u(k-1) twice: rank-deficient by construction.
    std::vector<Term> s{Term::y(1), Term::u(1), Term::u(1)};
    const auto m = estimate_parameters(d, s, {1, 1, 1});
    for (double c : m.coefficients) CHECK(std::isfinite(c));
    const auto rows = estimation_rows(d, 1);
    const auto X = build_regressor(d, s, rows);
    const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(d.y.data() + rows.begin, rows.size());
    const Eigen::MatrixXd pinv = X.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::VectorXd oracle = X * (pinv * target);
    const Eigen::VectorXd fitted = X * Eigen::Map<const Eigen::VectorXd>(m.coefficients.data(), 3);
    CHECK((fitted - oracle).norm() <= 1e-8 * oracle.norm());
}

TEST_CASE("least squares optimality under perturbation") {
    const auto d = simulate(benchmark_system(SystemId::S3, 2));
    const auto truth = true_structure(SystemId::S3);
    const auto m = estimate_parameters(d, truth, {4, 4, 3});
    const auto rows = estimation_rows(d, 4);
    auto sse = [&](const EstimatedModel& mm) {
        const auto yhat = simulate_one_step(mm, d, rows);
        double s = 0;
        for (std::size_t k = rows.begin; k < rows.end; ++k) s += std::pow(d.y[k] - yhat[k - rows.begin], 2);
        return s;
    };
    const double base = sse(m);
    for (std::size_t i = 0; i < m.coefficients.size(); ++i)
        for (double delta : {-1e-3, 1e-3}) {
            auto p = m;
            p.coefficients[i] += delta;
            CHECK(sse(p) >= base);
        }
}

TEST_CASE("free-run simulation") {
    SUBCASE("geometric decay") {
        auto d = test::make_dataset(std::vector<double>(6, 0.0), {1, 0, 0, 0, 0, 0}, 1);
        EstimatedModel m{{Term::y(1)}, {0.5}, {0, 1, 1}};
        const auto fr = simulate_free_run(m, d, Rows{1, 6});
        REQUIRE_FALSE(fr.divergent);
        const std::vector<double> expect{0.5, 0.25, 0.125, 0.0625, 0.03125};
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(fr.yhat[i] == doctest::Approx(expect[i]));
    }
    SUBCASE("divergence flagged") {
        std::vector<double> y(1200, 0.0);
        y[0] = 1.0;
        auto d = test::make_dataset(std::vector<double>(1200, 0.0), y, 1);
        EstimatedModel m{{Term::y(1)}, {2.0}, {0, 1, 1}};
        const auto fr = simulate_free_run(m, d, Rows{1, 1100});
        CHECK(fr.divergent);
        CHECK(fr.yhat.size() < 1099);
        CHECK(prediction_nmse(m, d, Rows{1, 1100}) == kDivergentNmse);
    }
}

TEST_CASE("nmse") {
    const std::vector<double> y{1, 2, 3};
    CHECK(nmse(y, y) == 0.0);
    CHECK(nmse(y, std::vector<double>{2, 2, 2}) == doctest::Approx(100.0));
    CHECK(nmse(y, std::vector<double>{1, 2, 4}) == doctest::Approx(100.0 * std::sqrt(0.5)));
    CHECK_THROWS_AS(nmse(std::vector<double>{1, 1, 1}, y), DegenerateDataError);
    CHECK_THROWS_AS(nmse(y, std::vector<double>{1, 2}), ArgumentError);

    // Common scaling about the mean leaves the value unchanged.
    Rng rng(3);
    std::vector<double> a(30), b(30);
    for (std::size_t i = 0; i < 30; ++i) {
        a[i] = rng.normal();
        b[i] = a[i] + 0.3 * rng.normal();
    }
    const double base = nmse(a, b);
    for (auto& v : a) v *= 7.5;
    for (auto& v : b) v *= 7.5;
    CHECK(nmse(a, b) == doctest::Approx(base));
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(test::make_dataset({1, 2}, {1}, 1).validate(), ArgumentError);
    CHECK_THROWS_AS(test::make_dataset({1, 2}, {1, 2}, 2).validate(), ArgumentError);
    CHECK_THROWS_AS(test::make_dataset({1, 2}, {1, 2}, 0).validate(), ArgumentError);
    CHECK_NOTHROW(test::make_dataset({1, 2}, {1, 2}, 1).validate());
}
