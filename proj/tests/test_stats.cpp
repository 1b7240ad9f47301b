#include "doctest.h"
#include "helpers.hpp"

#include "narxmo/error.hpp"
#include "narxmo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

using namespace narxmo;

namespace {

BlockedSamples table6() {
    return {{0.7310, 0.7260, 0.7269}, {0.9280, 0.9279, 0.9280}, {0.8768, 0.8771, 0.8760},
            {0.9316, 0.9315, 0.9315}, {0.6388, 0.6382, 0.6354}, {0.9389, 0.9389, 0.9388},
            {0.8745, 0.8686, 0.8634}, {0.9353, 0.9353, 0.9353}, {0.7609, 0.7462, 0.7353}};
}

// Closed testing with Simes local tests: APV_i = max over subsets containing i.
std::vector<double> hommel_closed_testing(const std::vector<double>& p) {
    const std::size_t n = p.size();
    std::vector<double> apv(n, 0.0);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<double> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) sub.push_back(p[i]);
        std::sort(sub.begin(), sub.end());
        double simes = 1.0;
        for (std::size_t j = 0; j < sub.size(); ++j)
            simes = std::min(simes, static_cast<double>(sub.size()) * sub[j] / static_cast<double>(j + 1));
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) apv[i] = std::max(apv[i], simes);
    }
    return apv;
}

}  // namespace

TEST_CASE("midranks") {
    CHECK(midranks({3, 1, 2}) == std::vector<double>{3, 1, 2});
    CHECK(midranks({5, 5, 1, 7}) == std::vector<double>{2.5, 2.5, 1, 4});
    CHECK(midranks({2, 2, 2}) == std::vector<double>{2, 2, 2});
}

TEST_CASE("friedman examples") {
    const auto same = friedman({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);

    const auto perfect = friedman({{1, 2, 3}, {4, 5, 6}, {0.1, 0.2, 0.3}});
    CHECK(perfect.statistic == doctest::Approx(6.0));
    CHECK(perfect.p_value == doctest::Approx(std::exp(-3.0)).epsilon(1e-6));
    CHECK(perfect.mean_ranks == std::vector<double>{1, 2, 3});

    CHECK_THROWS_AS(friedman({{1, 2}}), ArgumentError);
    CHECK_THROWS_AS(friedman({{1, 2}, {1}}), ArgumentError);
    CHECK_THROWS_AS(friedman({{1, 2}, {1, NAN}}), ArgumentError);
}

TEST_CASE("friedman on the published hypervolume table") {
    const auto r = friedman(table6(), RankOrder::largest_first);
    const std::vector<double> paper{1.2, 2.1, 2.7};
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(r.mean_ranks[j] - paper[j]) <= 0.25);
    CHECK(r.statistic >= 6.5);
    CHECK(r.statistic <= 11.0);
    CHECK(r.p_value < 0.05);
}

TEST_CASE("friedman closed form without ties") {
    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        const std::size_t N = 3 + rng.below(10), k = 2 + rng.below(4);
        BlockedSamples s(N, std::vector<double>(k));
        std::vector<double> R(k, 0.0);
        for (auto& row : s) {
            for (auto& v : row) v = rng.normal();
            for (std::size_t j = 0; j < k; ++j) {
                double rank = 1;
                for (std::size_t i = 0; i < k; ++i) rank += row[i] < row[j];
                R[j] += rank;
            }
        }
        double ss = 0;
        for (double x : R) ss += x * x;
        const double Nd = static_cast<double>(N), kd = static_cast<double>(k);
        const double oracle = 12.0 / (Nd * kd * (kd + 1)) * ss - 3 * Nd * (kd + 1);
        REQUIRE(friedman(s).statistic == doctest::Approx(oracle));

        // ranks only: a strictly increasing map per row changes nothing
        auto m = s;
        for (auto& row : m) {
            const double a = rng.uniform(0.5, 3), b = rng.uniform(-2, 2);
            for (auto& v : row) v = std::exp(a * v) + b;
        }
        REQUIRE(friedman(m).statistic == doctest::Approx(friedman(s).statistic));
        REQUIRE(friedman(m).p_value >= 0.0);
        REQUIRE(friedman(m).p_value <= 1.0);
    }
}

TEST_CASE("hommel post-hoc against the published comparison") {
    const auto r = hommel_posthoc({1.2, 2.1, 2.7}, 9, 0);
    REQUIRE(r.z.size() == 2);
    CHECK(r.compared == std::vector<std::size_t>{1, 2});
    CHECK(std::abs(r.z[0] - 1.88) <= 0.15);
    CHECK(std::abs(r.z[1] - 3.06) <= 0.15);
    CHECK(std::abs(r.raw_p[0] - 0.0593) <= 0.01);
    CHECK(std::abs(r.raw_p[1] - 0.0022) <= 0.01);
    CHECK(r.z[0] == doctest::Approx(1.909).epsilon(1e-3));
    CHECK(r.z[1] == doctest::Approx(3.182).epsilon(1e-3));
}

TEST_CASE("hommel edge cases") {
    const auto eq = hommel_posthoc({2, 2, 2}, 9, 1);
    for (double z : eq.z) CHECK(z == 0.0);
    for (double p : eq.adjusted_p) CHECK(p == 1.0);
    for (bool rej : eq.reject) CHECK_FALSE(rej);

    const auto two = hommel_posthoc({1.0, 2.0}, 10, 0);
    CHECK(two.adjusted_p[0] == two.raw_p[0]);

    CHECK_THROWS_AS(hommel_posthoc({1, 2}, 9, 2), ArgumentError);
    CHECK_THROWS_AS(hommel_adjust({0.5, 1.5}), ArgumentError);
}

TEST_CASE("hommel adjustment equals closed testing") {
    Rng rng(62);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> p(1 + rng.below(6));
        for (auto& x : p) x = rng.below(3) == 0 ? rng.uniform(0, 0.02) : rng.uniform01();
        const auto a = hommel_adjust(p), o = hommel_closed_testing(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            REQUIRE(a[i] == doctest::Approx(o[i]));
            REQUIRE(a[i] >= p[i]);
        }
        // adjusted values keep the raw ordering
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = 0; j < p.size(); ++j)
                if (p[i] < p[j]) REQUIRE(a[i] <= a[j] + 1e-15);
    }
}

TEST_CASE("wilcoxon signed rank") {
    std::vector<double> x(20), y(20);
    Rng rng(63);
    for (auto& v : x) v = rng.normal();
    const auto same = wilcoxon_signed_rank(x, x);
    CHECK(same.p_value == 1.0);
    CHECK(same.degenerate);

    for (std::size_t i = 0; i < 20; ++i) y[i] = x[i] - 1.0;
    const auto up = wilcoxon_signed_rank(x, y);
    CHECK(up.statistic == doctest::Approx(210.0));
    CHECK(up.p_value < 0.001);
    CHECK(wilcoxon_signed_rank(y, x).p_value > 0.999);
    CHECK(wilcoxon_signed_rank(x, y, Alternative::two_sided).p_value < 0.001);

    CHECK_THROWS_AS(wilcoxon_signed_rank({1, 2, 3, 4, 5}, {0, 0, 0, 0, 0}), ArgumentError);
    CHECK_THROWS_AS(wilcoxon_signed_rank({1, 2}, {1}), ArgumentError);
    CHECK(parse_alternative("two_sided") == Alternative::two_sided);
    CHECK_THROWS_AS(parse_alternative("less"), ArgumentError);
}

TEST_CASE("wilcoxon normal approximation by hand") {
    // d = 1..8 with signs + + + + + - - +: W+ = 1+2+3+4+5+8 = 23
    const std::vector<double> x{1, 2, 3, 4, 5, -6, -7, 8}, y(8, 0.0);
    const auto r = wilcoxon_signed_rank(x, y);
    CHECK(r.statistic == 23.0);
    const double mean = 8 * 9 / 4.0, sd = std::sqrt(8 * 9 * 17 / 24.0);
    const double z = (23 - mean - 0.5) / sd;
    CHECK(r.z[0] == doctest::Approx(z));
    CHECK(r.p_value == doctest::Approx(0.5 * std::erfc(z / std::sqrt(2.0))));
}
