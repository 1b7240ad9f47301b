#include "narxmo/evo_core.hpp"

#include "narxmo/error.hpp"

#include <algorithm>
#include <cmath>

namespace narxmo {

Genome::Genome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
}

Genome Genome::from_string(const std::string& s) {
    std::vector<std::uint8_t> b;
    b.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw ParseError("genome string must contain only '0'/'1'");
        b.push_back(c == '1');
    }
    return Genome(std::move(b));
}

std::size_t Genome::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Genome::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out.push_back(i);
    return out;
}

std::string Genome::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) s[i] = '1';
    return s;
}

std::size_t GenomeHash::operator()(const Genome& g) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (auto b : g.bits()) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
}

void GoalPoint::validate() const {
    if (xi_lim < 1) throw ArgumentError("goal: xi_lim must be >= 1");
    if (!(nmse_lim > 0)) throw ArgumentError("goal: nmse_lim must be > 0");
}

namespace {
// Bracket operator: magnitude of a negative operand, else zero.
double bracket(double x) { return x < 0 ? -x : 0.0; }
}  // namespace

ObjectiveVector penalized_objectives(int xi, double nmse, const GoalPoint& goal) {
    ObjectiveVector o;
    o.xi = xi;
    o.nmse = nmse;
    o.penalty = kPenaltyFactor * (bracket(goal.nmse_lim - nmse) + bracket(static_cast<double>(goal.xi_lim - xi)));
    o.j1 = xi + o.penalty;
    o.j2 = nmse + o.penalty;
    return o;
}

bool dominates(double a1, double a2, double b1, double b2) noexcept {
    return a1 <= b1 && a2 <= b2 && (a1 < b1 || a2 < b2);
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
    return dominates(a.j1, a.j2, b.j1, b.j2);
}

std::vector<Term> decode(const Genome& g, const ModelSet& ms) {
    if (g.size() != ms.size()) throw ArgumentError("decode: genome length does not match model set");
    std::vector<Term> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i]) out.push_back(ms[i]);
    return out;
}

namespace {
void check_same_length(const Genome& p, const Genome& q) {
    if (p.size() != q.size()) throw ArgumentError("crossover: parent lengths differ");
}
}  // namespace

std::pair<Genome, Genome> uniform_crossover(const Genome& p, const Genome& q, double p_c, Rng& rng) {
    check_same_length(p, q);
    Genome a = p, b = q;
    if (p_c > rng.uniform01()) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (0.5 > rng.uniform01()) {
                a.set(j, q[j]);
                b.set(j, p[j]);
            }
        }
    }
    return {std::move(a), std::move(b)};
}

std::pair<Genome, Genome> single_point_crossover_at(const Genome& p, const Genome& q, std::size_t cut) {
    check_same_length(p, q);
    Genome a = p, b = q;
    for (std::size_t j = cut; j < p.size(); ++j) {
        a.set(j, q[j]);
        b.set(j, p[j]);
    }
    return {std::move(a), std::move(b)};
}

std::pair<Genome, Genome> single_point_crossover(const Genome& p, const Genome& q, double p_c, Rng& rng) {
    check_same_length(p, q);
    if (p.size() < 2 || !(p_c > rng.uniform01())) return {p, q};
    const std::size_t cut = 1 + rng.below(p.size() - 1);
    return single_point_crossover_at(p, q, cut);
}

void repair_empty(Genome& g, Rng& rng) {
    if (g.size() > 0 && g.none()) g.set(rng.below(g.size()), true);
}

Genome flip_bit_mutation(Genome g, double p_m, Rng& rng) {
    for (std::size_t j = 0; j < g.size(); ++j)
        if (p_m > rng.uniform01()) g.flip(j);
    repair_empty(g, rng);
    return g;
}

bool ParetoArchive::contains(const Genome& g) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const ArchiveEntry& e) { return e.genome == g; });
}

bool ParetoArchive::insert(const ArchiveEntry& e) {
    for (const auto& m : entries_) {
        if (m.genome == e.genome || dominates(m.objectives, e.objectives)) return false;
    }
    std::erase_if(entries_, [&](const ArchiveEntry& m) { return dominates(e.objectives, m.objectives); });
    entries_.push_back(e);
    return true;
}

void ParetoArchive::erase(std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end(), std::greater<>());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (auto i : idx) entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
}

void ParetoArchive::sort() {
    std::sort(entries_.begin(), entries_.end(), [](const ArchiveEntry& a, const ArchiveEntry& b) {
        if (a.objectives.j1 != b.objectives.j1) return a.objectives.j1 < b.objectives.j1;
        if (a.objectives.j2 != b.objectives.j2) return a.objectives.j2 < b.objectives.j2;
        return a.genome < b.genome;
    });
}

ParetoArchive archive_from(const std::vector<ArchiveEntry>& entries) {
    ParetoArchive a;
    for (const auto& e : entries) a.insert(e);
    a.sort();
    return a;
}

const ObjectiveVector& CachedEvaluator::operator()(const Genome& g) {
    ++lookups_;
    auto it = cache_.find(g);
    if (it != cache_.end()) return it->second;
    ++evaluations_;
    return cache_.emplace(g, problem_->evaluate(g)).first->second;
}

NarxProblem::NarxProblem(const ModelSet& ms, const Dataset& data, GoalPoint goal, ErrorMode mode)
    : ms_(&ms), data_(&data), goal_(goal), mode_(mode) {
    data.validate();
    goal.validate();
    const int lag = ms.spec().max_lag();
    est_rows_ = estimation_rows(data, lag);
    val_rows_ = validation_rows(data, lag);
    if (val_rows_.size() < 2) throw ArgumentError("validation partition too short");
    full_ = build_regressor(data, ms.terms(), est_rows_);
    target_ = Eigen::Map<const Eigen::VectorXd>(data.y.data() + est_rows_.begin,
                                                static_cast<Eigen::Index>(est_rows_.size()));
}

EstimatedModel NarxProblem::fit(const Genome& g) const {
    const auto idx = g.indices();
    if (idx.empty()) throw ArgumentError("cannot fit an empty genome");
    if (g.size() != ms_->size()) throw ArgumentError("genome length does not match model set");
    if (idx.size() > est_rows_.size()) throw ArgumentError("fewer estimation rows than terms");
    Eigen::MatrixXd X(full_.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        X.col(static_cast<Eigen::Index>(j)) = full_.col(static_cast<Eigen::Index>(idx[j]));
    const auto sol = solve_least_squares(X, target_);

    EstimatedModel m;
    m.source = ms_->spec();
    m.structure.reserve(idx.size());
    for (auto i : idx) m.structure.push_back((*ms_)[i]);
    m.coefficients.assign(sol.coefficients.data(), sol.coefficients.data() + sol.coefficients.size());
    return m;
}

double NarxProblem::validation_nmse(const EstimatedModel& m) const {
    for (double c : m.coefficients)
        if (!std::isfinite(c)) return kDivergentNmse;
    try {
        return prediction_nmse(m, *data_, val_rows_, mode_);
    } catch (const DegenerateDataError&) {
        throw;
    } catch (const std::exception&) {
        return kDivergentNmse;
    }
}

ObjectiveVector NarxProblem::evaluate(const Genome& g) {
    const int xi = static_cast<int>(g.count());
    double e = kDivergentNmse;
    try {
        e = validation_nmse(fit(g));
    } catch (const DegenerateDataError&) {
        throw;
    } catch (const std::exception&) {
        e = kDivergentNmse;
    }
    return penalized_objectives(xi, e, goal_);
}

}  // namespace narxmo
