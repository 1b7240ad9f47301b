#include "doctest.h"
#include "helpers.hpp"

#include "narxmo/error.hpp"
#include "narxmo/outcomes.hpp"

#include <cmath>

using namespace narxmo;

namespace {

Genome genome_for(const ModelSet& ms, const std::vector<Term>& s) {
    Genome g(ms.size());
    for (const auto& t : s) g.set(*ms.index_of(t), true);
    return g;
}

}  // namespace

TEST_CASE("t statistics against the normal-equations formula") {
    const auto d = simulate(benchmark_system(SystemId::S3, 4));
    const std::vector<Term> s{Term::y(1), Term::u(1), Term::u(1) * Term::u(1), Term::y(2)};
    const auto t = t_statistics(d, s, 4);
    const auto rows = estimation_rows(d, 4);
    const auto X = build_regressor(d, s, rows);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(d.y.data() + rows.begin, rows.size());
    const Eigen::MatrixXd XtX_inv = (X.transpose() * X).inverse();
    const Eigen::VectorXd beta = XtX_inv * X.transpose() * y;
    const double s2 = (y - X * beta).squaredNorm() / static_cast<double>(X.rows() - X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        CHECK(t[j] == doctest::Approx(beta(j) / std::sqrt(s2 * XtX_inv(j, j))).epsilon(1e-6));
}

TEST_CASE("refinement drops a spurious term") {
    const auto d = simulate(benchmark_system(SystemId::S6, 5));
    auto s = true_structure(SystemId::S6);
    s.push_back(Term::y(3) * Term::u(2));
    const auto m = estimate_parameters(d, s, {4, 4, 3});
    const auto r = refine_structure(m, d);
    CHECK_FALSE(r.degenerate);
    REQUIRE(r.removed.size() == 1);
    CHECK(r.removed[0] == Term::y(3) * Term::u(2));
    CHECK(classify_outcome(r.model.structure, true_structure(SystemId::S6)) == OutcomeLabel::exact_fitting);

    // refining the result again changes nothing
    const auto again = refine_structure(r.model, d);
    CHECK(again.removed.empty());
    CHECK(again.model.structure == r.model.structure);
}

TEST_CASE("refinement keeps a fully significant structure") {
    const auto d = simulate(benchmark_system(SystemId::S6, 6));
    const auto m = estimate_parameters(d, true_structure(SystemId::S6), {4, 4, 3});
    const auto r = refine_structure(m, d);
    CHECK(r.removed.empty());
    CHECK(r.model.structure == m.structure);
    for (std::size_t i = 0; i < m.coefficients.size(); ++i)
        CHECK(r.model.coefficients[i] == doctest::Approx(m.coefficients[i]));
}

TEST_CASE("refinement of a structure that explains nothing") {
    Rng rng(9);
    std::vector<double> u(600), y(600);
    for (auto& v : u) v = rng.uniform(-1, 1);
    for (auto& v : y) v = rng.normal();
    const auto d = test::make_dataset(u, y, 400);
    const auto m = estimate_parameters(d, std::vector<Term>{Term::u(2) * Term::u(3)}, {3, 3, 2});
    const auto r = refine_structure(m, d);
    CHECK(r.degenerate);
    CHECK(r.removed.size() == 1);
    CHECK(r.model.structure.empty());
}

TEST_CASE("refinement removes a duplicated column") {
    const auto d = simulate(benchmark_system(SystemId::S6, 7));
    auto s = true_structure(SystemId::S6);
    s.push_back(Term::u(1));
    const auto r = refine_structure(estimate_parameters(d, s, {4, 4, 3}), d);
    CHECK(r.removed.size() == 1);
    CHECK(r.model.structure.size() == 4);
    CHECK_THROWS_AS(refine_structure(estimate_parameters(d, s, {4, 4, 3}), d, 1.5), ArgumentError);
}

TEST_CASE("outcome classification") {
    const std::vector<Term> truth{Term::y(1), Term::u(1)};
    CHECK(classify_outcome({Term::u(1), Term::y(1)}, truth) == OutcomeLabel::exact_fitting);
    CHECK(classify_outcome({Term::y(1), Term::u(1), Term::u(2)}, truth) == OutcomeLabel::over_fitting);
    CHECK(classify_outcome({Term::y(1)}, truth) == OutcomeLabel::under_fitting_1);
    CHECK(classify_outcome({Term::y(1), Term::u(2)}, truth) == OutcomeLabel::under_fitting_2);
    CHECK(classify_outcome({}, truth) == OutcomeLabel::under_fitting_1);

    // Exactly one label for every subset of a small universe.
    const std::vector<Term> universe{Term::y(1), Term::u(1), Term::u(2), Term::y(2)};
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<Term> s;
        for (int i = 0; i < 4; ++i)
            if (mask >> i & 1) s.push_back(universe[i]);
        const auto l = classify_outcome(s, truth);
        const bool has_all = (mask & 3) == 3, extra = (mask & 12) != 0;
        const auto expect = has_all ? (extra ? OutcomeLabel::over_fitting : OutcomeLabel::exact_fitting)
                                    : (extra ? OutcomeLabel::under_fitting_2 : OutcomeLabel::under_fitting_1);
        CHECK(l == expect);
    }
}

TEST_CASE("outcome table") {
    const auto ms = generate_model_set(4, 4, 3);
    const auto d = simulate(benchmark_system(SystemId::S6, 8));
    const auto truth = true_structure(SystemId::S6);
    ArchiveEntry e;
    e.genome = genome_for(ms, truth);
    e.objectives = test::obj(4, 1.0);
    const auto c = outcome_table({e}, ms, truth, d);
    CHECK(c.total == 1);
    CHECK(c[OutcomeLabel::exact_fitting] == 1);
    const auto empty = outcome_table({}, ms, truth, d);
    CHECK(empty.total == 0);
    for (auto l : kOutcomeLabels) CHECK(empty[l] == 0);
}

TEST_CASE("information criteria") {
    const auto p = information_criteria(3, 1.0, 100);
    CHECK(p.bic == doctest::Approx(100 * std::log(0.01) + 3 * std::log(100.0)));
    CHECK(p.lilc == doctest::Approx(100 * std::log(0.01) + 6 * std::log(std::log(100.0))));
    CHECK(p.bic == doctest::Approx(-446.70).epsilon(1e-4));
    CHECK(p.lilc == doctest::Approx(-451.35).epsilon(1e-4));
    // zero residual is floored rather than -inf
    CHECK(std::isfinite(information_criteria(1, 0.0, 50).bic));
    CHECK_THROWS_AS(information_criteria(1, 1.0, 2), ArgumentError);

    // On real data the curve is sorted by cardinality.
    const auto ms = generate_model_set(4, 4, 3);
    const auto d = simulate(benchmark_system(SystemId::S6, 9));
    auto truth = true_structure(SystemId::S6);
    std::vector<ArchiveEntry> arch;
    for (std::size_t k = truth.size(); k >= 1; --k) {
        ArchiveEntry e;
        e.genome = genome_for(ms, std::vector<Term>(truth.begin(), truth.begin() + static_cast<std::ptrdiff_t>(k)));
        e.objectives = test::obj(static_cast<double>(k), 10.0 / k);
        arch.push_back(e);
    }
    const auto ic = information_criteria(arch, ms, d);
    REQUIRE(ic.size() == truth.size());
    for (std::size_t i = 1; i < ic.size(); ++i) CHECK(ic[i - 1].xi < ic[i].xi);
}

TEST_CASE("knee selection refines the MMD top") {
    const auto ms = generate_model_set(4, 4, 3);
    const auto d = simulate(benchmark_system(SystemId::S6, 10));
    auto over = true_structure(SystemId::S6);
    over.push_back(Term::y(4) * Term::y(4));
    ArchiveEntry a, b, c;
    a.genome = genome_for(ms, {Term::y(1)});
    a.objectives = test::obj(1, 50);
    b.genome = genome_for(ms, over);
    b.objectives = test::obj(5, 5);
    c.genome = genome_for(ms, generate_model_set(4, 4, 3).terms());
    c.objectives = test::obj(165, 4.9);
    const auto k = select_knee({a, b, c}, ms, d);
    CHECK(k.top.genome == b.genome);
    CHECK(classify_outcome(k.refined.model.structure, true_structure(SystemId::S6)) == OutcomeLabel::exact_fitting);
}
