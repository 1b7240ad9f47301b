#include "narxmo/optimizers.hpp"

#include "narxmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace narxmo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table, const char* what) {
    for (const auto& [name, v] : table)
        if (s == name) return v;
    throw ArgumentError(std::string("unknown ") + what + " '" + s + "'");
}
}  // namespace

Algorithm parse_algorithm(const std::string& s) {
    return parse_enum<Algorithm>(s, {{"nsga2", Algorithm::nsga2}, {"spea2", Algorithm::spea2}, {"moead", Algorithm::moead}},
                                 "algorithm");
}
CrossoverKind parse_crossover(const std::string& s) {
    return parse_enum<CrossoverKind>(
        s, {{"uniform", CrossoverKind::uniform}, {"single_point", CrossoverKind::single_point}}, "crossover");
}
Aggregation parse_aggregation(const std::string& s) {
    return parse_enum<Aggregation>(
        s, {{"tchebycheff", Aggregation::tchebycheff}, {"weighted_sum", Aggregation::weighted_sum}}, "aggregation");
}
CtsTie parse_cts_tie(const std::string& s) {
    return parse_enum<CtsTie>(s, {{"larger", CtsTie::larger}, {"smaller", CtsTie::smaller}}, "cts_tie");
}
std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::nsga2: return "nsga2";
        case Algorithm::spea2: return "spea2";
        case Algorithm::moead: return "moead";
    }
    return "?";
}
std::string to_string(CrossoverKind c) { return c == CrossoverKind::uniform ? "uniform" : "single_point"; }
std::string to_string(Aggregation a) { return a == Aggregation::tchebycheff ? "tchebycheff" : "weighted_sum"; }
std::string to_string(CtsTie t) { return t == CtsTie::larger ? "larger" : "smaller"; }

RunConfig RunConfig::defaults(Algorithm a) {
    RunConfig c;
    c.algorithm = a;
    switch (a) {
        case Algorithm::nsga2: c.p_c = 0.9; c.p_m = 0.006; break;
        case Algorithm::spea2: c.p_c = 0.7; c.p_m = 0.008; break;
        case Algorithm::moead: c.p_c = 0.8; c.p_m = 0.008; break;
    }
    return c;
}

void RunConfig::validate() const {
    if (ps < 4 || ps % 2 != 0) throw ArgumentError("ps must be even and >= 4");
    if (fe_budget < ps) throw ArgumentError("fe_budget must be >= ps");
    if (!(p_c >= 0 && p_c <= 1)) throw ArgumentError("p_c must lie in [0, 1]");
    if (!(p_m >= 0 && p_m <= 1)) throw ArgumentError("p_m must lie in [0, 1]");
    if (spea2_k < 1) throw ArgumentError("spea2_k must be >= 1");
    if (moead_nr < 1 || !(moead_nr < moead_T) || !(moead_T < ps))
        throw ArgumentError("MOEA/D requires 1 <= nr < T < ps");
    if (archive_capacity < 1) throw ArgumentError("archive_capacity must be >= 1");
    if (generation_cap_factor < 1) throw ArgumentError("generation_cap_factor must be >= 1");
}

// ---------------------------------------------------------------------------
// Ranking primitives

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& objs) {
    const std::size_t n = objs.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> counter(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(objs[i], objs[j]))
                dominated_by[i].push_back(j);
            else if (dominates(objs[j], objs[i]))
                ++counter[i];
        }
        if (counter[i] == 0) current.push_back(i);
    }
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (auto i : current)
            for (auto j : dominated_by[i])
                if (--counter[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), kInf);
        return d;
    }
    std::vector<std::size_t> order(n);
    for (int p = 0; p < 2; ++p) {
        auto val = [&](std::size_t i) { return p == 0 ? front[i].j1 : front[i].j2; };
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return val(a) < val(b); });
        d[order.front()] = kInf;
        d[order.back()] = kInf;
        const double range = val(order.back()) - val(order.front());
        if (!(range > 0)) continue;
        for (std::size_t r = 1; r + 1 < n; ++r)
            d[order[r]] += (val(order[r + 1]) - val(order[r - 1])) / range;
    }
    return d;
}

Spea2Fitness spea2_fitness(const std::vector<ObjectiveVector>& objs, std::size_t k) {
    const std::size_t n = objs.size();
    Spea2Fitness f;
    f.strength.assign(n, 0);
    f.raw.assign(n, 0.0);
    f.density.assign(n, 0.0);
    f.fitness.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && dominates(objs[i], objs[j])) ++f.strength[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && dominates(objs[j], objs[i])) f.raw[i] += f.strength[j];

    std::vector<double> dist;
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) dist.push_back(std::hypot(objs[i].j1 - objs[j].j1, objs[i].j2 - objs[j].j2));
        double sigma = 0.0;
        if (!dist.empty()) {
            const std::size_t kk = std::min(k, dist.size()) - 1;
            std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
            sigma = dist[kk];
        }
        f.density[i] = 1.0 / (sigma + 2.0);
        f.fitness[i] = f.raw[i] + f.density[i];
    }
    return f;
}

std::vector<std::size_t> spea2_truncate(const std::vector<ObjectiveVector>& objs, std::vector<std::size_t> members,
                                        std::size_t capacity) {
    auto distance = [&](std::size_t a, std::size_t b) {
        return std::hypot(objs[a].j1 - objs[b].j1, objs[a].j2 - objs[b].j2);
    };
    while (members.size() > capacity) {
        // Remove the member whose sorted neighbour-distance list is
        // lexicographically smallest; first index wins exact ties.
        std::size_t victim = 0;
        std::vector<double> best;
        for (std::size_t a = 0; a < members.size(); ++a) {
            std::vector<double> d;
            d.reserve(members.size() - 1);
            for (std::size_t b = 0; b < members.size(); ++b)
                if (a != b) d.push_back(distance(members[a], members[b]));
            std::sort(d.begin(), d.end());
            if (a == 0 || std::lexicographical_compare(d.begin(), d.end(), best.begin(), best.end())) {
                best = std::move(d);
                victim = a;
            }
        }
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    return members;
}

std::vector<std::size_t> spea2_environmental_selection(const std::vector<ObjectiveVector>& objs,
                                                       const Spea2Fitness& fit, std::size_t capacity) {
    std::vector<std::size_t> nd, rest;
    for (std::size_t i = 0; i < objs.size(); ++i) (fit.fitness[i] < 1.0 ? nd : rest).push_back(i);
    if (nd.size() > capacity) return spea2_truncate(objs, std::move(nd), capacity);
    std::stable_sort(rest.begin(), rest.end(), [&](auto a, auto b) { return fit.fitness[a] < fit.fitness[b]; });
    for (std::size_t i = 0; i < rest.size() && nd.size() < capacity; ++i) nd.push_back(rest[i]);
    return nd;
}

std::vector<Weight> generate_weight_vectors(std::size_t ps) {
    if (ps < 2) throw ArgumentError("weight vectors need ps >= 2");
    std::vector<Weight> w(ps);
    for (std::size_t i = 0; i < ps; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(ps - 1);
        w[i] = {a, 1.0 - a};
    }
    return w;
}

std::vector<std::vector<std::size_t>> weight_neighborhoods(const std::vector<Weight>& w, std::size_t T) {
    if (T < 1 || T > w.size()) throw ArgumentError("neighbourhood size must lie in [1, ps]");
    std::vector<std::vector<std::size_t>> B(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::vector<std::size_t> idx(w.size());
        std::iota(idx.begin(), idx.end(), 0);
        auto d = [&](std::size_t j) { return std::hypot(w[i][0] - w[j][0], w[i][1] - w[j][1]); };
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return d(a) < d(b); });
        B[i].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(T));
    }
    return B;
}

double tchebycheff(const std::array<double, 2>& J, const Weight& w, const std::array<double, 2>& ideal) {
    double g = 0.0;
    for (int p = 0; p < 2; ++p) g = std::max(g, std::max(w[p], kMinWeight) * std::abs(J[p] - ideal[p]));
    return g;
}

double weighted_sum(const std::array<double, 2>& J, const Weight& w) { return w[0] * J[0] + w[1] * J[1]; }

void truncate_by_crowding(ParetoArchive& archive, std::size_t capacity) {
    while (archive.size() > capacity) {
        std::vector<ObjectiveVector> objs;
        for (const auto& e : archive.entries()) objs.push_back(e.objectives);
        const auto cd = crowding_distance(objs);
        const auto victim = static_cast<std::size_t>(std::min_element(cd.begin(), cd.end()) - cd.begin());
        archive.erase({victim});
    }
}

// ---------------------------------------------------------------------------
// Shared machinery

namespace {

struct Member {
    Genome genome;
    ObjectiveVector obj;
};

std::vector<ObjectiveVector> objectives_of(const std::vector<Member>& pop) {
    std::vector<ObjectiveVector> o;
    o.reserve(pop.size());
    for (const auto& m : pop) o.push_back(m.obj);
    return o;
}

Genome random_genome(std::size_t n, std::size_t max_terms, Rng& rng) {
    Genome g(n);
    if (max_terms == 0) {
        for (std::size_t i = 0; i < n; ++i) g.set(i, rng.uniform01() < 0.5);
    } else {
        const std::size_t card = 1 + rng.below(std::min(max_terms, n));
        // Partial Fisher-Yates over positions.
        std::vector<std::size_t> pos(n);
        std::iota(pos.begin(), pos.end(), 0);
        for (std::size_t i = 0; i < card; ++i) {
            const std::size_t j = i + rng.below(n - i);
            std::swap(pos[i], pos[j]);
            g.set(pos[i], true);
        }
    }
    repair_empty(g, rng);
    return g;
}

std::pair<Genome, Genome> crossover(const RunConfig& cfg, const Genome& p, const Genome& q, Rng& rng) {
    return cfg.crossover == CrossoverKind::uniform ? uniform_crossover(p, q, cfg.p_c, rng)
                                                   : single_point_crossover(p, q, cfg.p_c, rng);
}

std::vector<Member> initial_population(const RunConfig& cfg, CachedEvaluator& eval, Rng& rng) {
    std::vector<Member> pop;
    pop.reserve(cfg.ps);
    for (std::size_t i = 0; i < cfg.ps; ++i) {
        Genome g = random_genome(eval.genome_length(), cfg.init_max_terms, rng);
        const auto o = eval(g);
        pop.push_back({std::move(g), o});
    }
    return pop;
}

// Pairs consecutive parents, recombines, then mutates every offspring.
std::vector<Member> reproduce(const RunConfig& cfg, const std::vector<const Genome*>& parents, CachedEvaluator& eval,
                              Rng& rng) {
    std::vector<Genome> kids;
    kids.reserve(parents.size());
    for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
        auto [a, b] = crossover(cfg, *parents[i], *parents[i + 1], rng);
        kids.push_back(std::move(a));
        kids.push_back(std::move(b));
    }
    std::vector<Member> out;
    out.reserve(kids.size());
    for (auto& k : kids) {
        Genome g = flip_bit_mutation(std::move(k), cfg.p_m, rng);
        const auto o = eval(g);
        out.push_back({std::move(g), o});
    }
    return out;
}

std::vector<ArchiveEntry> first_front(const std::vector<Member>& pop) {
    const auto objs = objectives_of(pop);
    const auto fronts = non_dominated_sort(objs);
    std::vector<ArchiveEntry> out;
    if (fronts.empty()) return out;
    for (auto i : fronts[0]) out.push_back({pop[i].genome, pop[i].obj});
    return out;
}

std::size_t generation_cap(const RunConfig& cfg) { return cfg.generation_cap_factor * (cfg.fe_budget / cfg.ps); }

}  // namespace

// ---------------------------------------------------------------------------
// NSGA-II

RunResult run_nsga2(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs) {
    cfg.validate();
    Rng rng(cfg.seed);
    CachedEvaluator eval(problem);
    std::vector<Member> pop = initial_population(cfg, eval, rng);

    std::vector<std::size_t> rank(pop.size());
    std::vector<double> crowd(pop.size());
    auto assign = [&](const std::vector<Member>& p) {
        const auto objs = objectives_of(p);
        const auto fronts = non_dominated_sort(objs);
        rank.assign(p.size(), 0);
        crowd.assign(p.size(), 0.0);
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            std::vector<ObjectiveVector> fo;
            for (auto i : fronts[f]) fo.push_back(objs[i]);
            const auto cd = crowding_distance(fo);
            for (std::size_t r = 0; r < fronts[f].size(); ++r) {
                rank[fronts[f][r]] = f;
                crowd[fronts[f][r]] = cd[r];
            }
        }
    };
    assign(pop);
    if (obs) obs(0, first_front(pop));

    auto tournament = [&]() -> const Genome* {
        const std::size_t a = rng.below(pop.size());
        std::size_t b = rng.below(pop.size() - 1);
        if (b >= a) ++b;
        if (rank[a] != rank[b]) return &pop[rank[a] < rank[b] ? a : b].genome;
        if (crowd[a] != crowd[b]) {
            const bool a_wins = cfg.cts_tie == CtsTie::larger ? crowd[a] > crowd[b] : crowd[a] < crowd[b];
            return &pop[a_wins ? a : b].genome;
        }
        return &pop[rng.uniform01() < 0.5 ? a : b].genome;
    };

    std::size_t gen = 0;
    const std::size_t cap = generation_cap(cfg);
    while (eval.evaluations() < cfg.fe_budget && gen < cap) {
        std::vector<const Genome*> parents;
        parents.reserve(cfg.ps);
        for (std::size_t i = 0; i < cfg.ps; ++i) parents.push_back(tournament());
        std::vector<Member> kids = reproduce(cfg, parents, eval, rng);

        std::vector<Member> uni = std::move(pop);
        uni.insert(uni.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
        const auto objs = objectives_of(uni);
        const auto fronts = non_dominated_sort(objs);

        std::vector<Member> next;
        next.reserve(cfg.ps);
        for (const auto& f : fronts) {
            if (next.size() + f.size() <= cfg.ps) {
                for (auto i : f) next.push_back(uni[i]);
                continue;
            }
            std::vector<ObjectiveVector> fo;
            for (auto i : f) fo.push_back(objs[i]);
            const auto cd = crowding_distance(fo);
            std::vector<std::size_t> order(f.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cd[a] > cd[b]; });
            for (std::size_t r = 0; next.size() < cfg.ps; ++r) next.push_back(uni[f[order[r]]]);
            break;
        }
        pop = std::move(next);
        assign(pop);
        ++gen;
        if (obs) obs(gen, first_front(pop));
    }

    RunResult res;
    res.archive = archive_from(first_front(pop));
    res.evaluations = eval.evaluations();
    res.generations = gen;
    return res;
}

// ---------------------------------------------------------------------------
// SPEA-II

RunResult run_spea2(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs) {
    cfg.validate();
    Rng rng(cfg.seed);
    CachedEvaluator eval(problem);
    std::vector<Member> pop = initial_population(cfg, eval, rng);
    std::vector<Member> archive;

    std::size_t gen = 0;
    const std::size_t cap = generation_cap(cfg);
    std::vector<double> arch_fit;
    while (true) {
        std::vector<Member> uni = archive;
        uni.insert(uni.end(), pop.begin(), pop.end());
        const auto objs = objectives_of(uni);
        const auto fit = spea2_fitness(objs, cfg.spea2_k);
        const auto keep = spea2_environmental_selection(objs, fit, cfg.ps);
        archive.clear();
        arch_fit.clear();
        for (auto i : keep) {
            archive.push_back(uni[i]);
            arch_fit.push_back(fit.fitness[i]);
        }
        if (obs) obs(gen, first_front(archive));
        if (eval.evaluations() >= cfg.fe_budget || gen >= cap) break;

        // Binary tournament on archive fitness (lower is better).
        std::vector<const Genome*> parents;
        parents.reserve(cfg.ps);
        for (std::size_t i = 0; i < cfg.ps; ++i) {
            const std::size_t a = rng.below(archive.size());
            const std::size_t b = rng.below(archive.size());
            parents.push_back(&archive[arch_fit[a] <= arch_fit[b] ? a : b].genome);
        }
        pop = reproduce(cfg, parents, eval, rng);
        ++gen;
    }

    RunResult res;
    res.archive = archive_from(first_front(archive));
    res.evaluations = eval.evaluations();
    res.generations = gen;
    return res;
}

// ---------------------------------------------------------------------------
// MOEA/D

RunResult run_moead(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs) {
    cfg.validate();
    Rng rng(cfg.seed);
    CachedEvaluator eval(problem);
    const auto W = generate_weight_vectors(cfg.ps);
    const auto B = weight_neighborhoods(W, cfg.moead_T);
    std::vector<Member> pop = initial_population(cfg, eval, rng);

    std::array<double, 2> ideal{kInf, kInf};
    ParetoArchive ext;
    auto observe = [&](const Member& m) {
        ideal[0] = std::min(ideal[0], m.obj.j1);
        ideal[1] = std::min(ideal[1], m.obj.j2);
        if (ext.insert({m.genome, m.obj})) truncate_by_crowding(ext, cfg.archive_capacity);
    };
    for (const auto& m : pop) observe(m);

    auto g = [&](const ObjectiveVector& o, std::size_t i) {
        const std::array<double, 2> J{o.j1, o.j2};
        return cfg.moead_aggregation == Aggregation::tchebycheff ? tchebycheff(J, W[i], ideal) : weighted_sum(J, W[i]);
    };
    if (obs) obs(0, ext.entries());

    std::size_t gen = 0;
    const std::size_t cap = generation_cap(cfg);
    bool done = eval.evaluations() >= cfg.fe_budget;
    while (!done && gen < cap) {
        for (std::size_t i = 0; i < cfg.ps && !done; ++i) {
            const auto& nb = B[i];
            const std::size_t a = rng.below(nb.size());
            std::size_t b = rng.below(nb.size() - 1);
            if (b >= a) ++b;
            auto [child, unused] = crossover(cfg, pop[nb[a]].genome, pop[nb[b]].genome, rng);
            (void)unused;
            Member kid{flip_bit_mutation(std::move(child), cfg.p_m, rng), {}};
            kid.obj = eval(kid.genome);
            observe(kid);

            std::vector<std::size_t> order = nb;
            for (std::size_t r = order.size(); r > 1; --r) std::swap(order[r - 1], order[rng.below(r)]);
            std::size_t replaced = 0;
            for (auto j : order) {
                if (replaced >= cfg.moead_nr) break;
                if (g(kid.obj, j) < g(pop[j].obj, j)) {
                    pop[j] = kid;
                    ++replaced;
                }
            }
            done = eval.evaluations() >= cfg.fe_budget;
        }
        ++gen;
        if (obs) obs(gen, ext.entries());
    }

    RunResult res;
    ext.sort();
    res.archive = std::move(ext);
    res.evaluations = eval.evaluations();
    res.generations = gen;
    return res;
}

RunResult run_optimizer(const RunConfig& cfg, Problem& problem, const GenerationObserver& obs) {
    switch (cfg.algorithm) {
        case Algorithm::nsga2: return run_nsga2(cfg, problem, obs);
        case Algorithm::spea2: return run_spea2(cfg, problem, obs);
        case Algorithm::moead: return run_moead(cfg, problem, obs);
    }
    throw ArgumentError("unknown algorithm");
}

RunResult run_optimizer(const RunConfig& cfg, const ModelSet& ms, const Dataset& data, const GoalPoint& goal,
                        ErrorMode mode) {
    NarxProblem problem(ms, data, goal, mode);
    return run_optimizer(cfg, problem);
}

}  // namespace narxmo
