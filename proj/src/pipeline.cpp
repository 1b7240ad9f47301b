#include "narxmo/pipeline.hpp"

#include "narxmo/error.hpp"
#include "narxmo/metrics.hpp"
#include "narxmo/outcomes.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace narxmo {

namespace fs = std::filesystem;

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(field(key), "missing");
        return j_.at(key);
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        return as<T>(key);
    }

    template <typename T>
    T need(const std::string& key) {
        raw(key);
        return as<T>(key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(field(k), "unknown key");
    }

private:
    template <typename T>
    T as(const std::string& key) const {
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(field(key), "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
            if constexpr (std::is_unsigned_v<T>)
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
                    throw ConfigError(field(key), "must be non-negative");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        }
        try {
            return v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(field(key), e.what());
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename F>
auto wrap(const std::string& field, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ArgumentError& e) {
        throw ConfigError(field, e.what());
    }
}

ModelSetSpec parse_model_set(const json& j, const std::string& path) {
    Fields f(j, path);
    ModelSetSpec s{f.need<int>("n_u"), f.need<int>("n_y"), f.need<int>("n_l")};
    f.finish();
    if (s.n_u < 0 || s.n_y < 0 || s.n_u + s.n_y < 1) throw ConfigError(path, "need n_u, n_y >= 0 with n_u + n_y >= 1");
    if (s.n_l < 1) throw ConfigError(path + ".n_l", "must be >= 1");
    return s;
}

GoalPoint parse_goal(const json& j, const std::string& path) {
    Fields f(j, path);
    GoalPoint g;
    g.xi_lim = f.get<int>("xi_lim", g.xi_lim);
    g.nmse_lim = f.get<double>("nmse_lim", g.nmse_lim);
    f.finish();
    wrap(path, [&] { g.validate(); });
    return g;
}

ErrorMode parse_error_mode(const std::string& s, const std::string& field) {
    if (s == "free_run") return ErrorMode::free_run;
    if (s == "one_step") return ErrorMode::one_step;
    throw ConfigError(field, "expected 'free_run' or 'one_step'");
}

std::string error_mode_name(ErrorMode m) { return m == ErrorMode::free_run ? "free_run" : "one_step"; }

std::string system_label(const ExperimentConfig& c) {
    if (c.system) return to_string(*c.system);
    return fs::path(c.data_path).filename().string();
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results are written
// by index, so scheduling order never leaks into outputs.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lk(m);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string run_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu.json", i + 1);
    return buf;
}

json ranked_to_json(const RankedFront& rf, const ModelSet& ms, std::size_t top) {
    json arr = json::array();
    for (std::size_t i = 0; i < rf.entries.size() && i < top; ++i) {
        const auto& e = rf.entries[i];
        json terms = json::array();
        for (const auto& t : decode(e.genome, ms)) terms.push_back(t.to_string());
        arr.push_back({{"rank", i + 1},
                       {"xi", e.objectives.xi},
                       {"nmse", e.objectives.nmse},
                       {"score", e.score},
                       {"bits", e.genome.to_string()},
                       {"terms", terms}});
    }
    return arr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

RunConfig parse_run_config(const json& j, const std::string& path) {
    Fields f(j, path);
    const auto algo = f.get<std::string>("algorithm", "nsga2");
    RunConfig r = wrap(f.field("algorithm"), [&] { return RunConfig::defaults(parse_algorithm(algo)); });
    r.ps = f.get<std::size_t>("ps", r.ps);
    r.fe_budget = f.get<std::size_t>("fe_budget", r.fe_budget);
    r.p_c = f.get<double>("p_c", r.p_c);
    r.p_m = f.get<double>("p_m", r.p_m);
    if (f.has("crossover"))
        r.crossover = wrap(f.field("crossover"), [&] { return parse_crossover(f.need<std::string>("crossover")); });
    r.spea2_k = f.get<std::size_t>("spea2_k", r.spea2_k);
    r.moead_T = f.get<std::size_t>("moead_T", r.moead_T);
    r.moead_nr = f.get<std::size_t>("moead_nr", r.moead_nr);
    if (f.has("moead_aggregation"))
        r.moead_aggregation = wrap(f.field("moead_aggregation"),
                                   [&] { return parse_aggregation(f.need<std::string>("moead_aggregation")); });
    if (f.has("cts_tie"))
        r.cts_tie = wrap(f.field("cts_tie"), [&] { return parse_cts_tie(f.need<std::string>("cts_tie")); });
    r.archive_capacity = f.get<std::size_t>("archive_capacity", r.archive_capacity);
    r.init_max_terms = f.get<std::size_t>("init_max_terms", r.init_max_terms);
    r.generation_cap_factor = f.get<std::size_t>("generation_cap_factor", r.generation_cap_factor);
    f.finish();
    wrap(path, [&] { r.validate(); });
    return r;
}

json run_config_to_json(const RunConfig& r) {
    return {{"algorithm", to_string(r.algorithm)},
            {"ps", r.ps},
            {"fe_budget", r.fe_budget},
            {"p_c", r.p_c},
            {"p_m", r.p_m},
            {"crossover", to_string(r.crossover)},
            {"spea2_k", r.spea2_k},
            {"moead_T", r.moead_T},
            {"moead_nr", r.moead_nr},
            {"moead_aggregation", to_string(r.moead_aggregation)},
            {"cts_tie", to_string(r.cts_tie)},
            {"archive_capacity", r.archive_capacity},
            {"init_max_terms", r.init_max_terms},
            {"generation_cap_factor", r.generation_cap_factor}};
}

void ExperimentConfig::validate() const {
    if (system.has_value() == !data_path.empty()) throw ConfigError("system", "give exactly one of 'system' or 'data'");
    if (system == SystemId::external) throw ConfigError("system", "'external' needs a data file");
    if (runs < 1) throw ConfigError("runs", "must be >= 1");
    if (model_set.n_l < 1 || model_set.n_u < 0 || model_set.n_y < 0 || model_set.n_u + model_set.n_y < 1)
        throw ConfigError("model_set", "invalid lag / degree specification");
    wrap("goal", [&] { goal.validate(); });
    wrap("run", [&] { run.validate(); });
    wrap("mcdm", [&] { preference.validate(); });
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha", "must lie in (0, 1)");
}

ExperimentConfig parse_experiment_config(const json& j) {
    Fields f(j, "");
    ExperimentConfig c;
    if (j.contains("schema_version")) f.need<int>("schema_version");
    if (f.has("system"))
        c.system = wrap("system", [&] { return parse_system_id(f.need<std::string>("system")); });
    c.data_path = f.get<std::string>("data", "");
    c.estimation_len = f.get<std::size_t>("estimation_len", 0);
    c.samples = f.get<std::size_t>("samples", 0);
    if (f.has("model_set")) c.model_set = parse_model_set(f.raw("model_set"), "model_set");
    if (f.has("goal")) c.goal = parse_goal(f.raw("goal"), "goal");
    if (f.has("run")) c.run = parse_run_config(f.raw("run"), "run");
    c.runs = f.get<std::size_t>("runs", c.runs);
    if (f.has("error_mode")) c.error_mode = parse_error_mode(f.need<std::string>("error_mode"), "error_mode");
    c.alpha = f.get<double>("alpha", c.alpha);
    c.seed = f.get<std::uint64_t>("seed", c.seed);
    if (f.has("mcdm")) {
        Fields m(f.raw("mcdm"), "mcdm");
        if (m.has("method"))
            c.mcdm = wrap("mcdm.method", [&] { return parse_mcdm_method(m.need<std::string>("method")); });
        c.preference.objective_ranks = m.get<std::vector<int>>("objective_ranks", c.preference.objective_ranks);
        c.preference.intensity = m.get<double>("intensity", c.preference.intensity);
        m.finish();
    }
    f.finish();
    c.validate();
    return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
    json j = {{"schema_version", kSchemaVersion}};
    if (c.system) j["system"] = to_string(*c.system);
    if (!c.data_path.empty()) j["data"] = c.data_path;
    j["estimation_len"] = c.estimation_len;
    j["samples"] = c.samples;
    j["model_set"] = model_set_to_json(c.model_set);
    j["goal"] = {{"xi_lim", c.goal.xi_lim}, {"nmse_lim", c.goal.nmse_lim}};
    j["run"] = run_config_to_json(c.run);
    j["runs"] = c.runs;
    j["error_mode"] = error_mode_name(c.error_mode);
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["mcdm"] = {{"method", to_string(c.mcdm)},
                 {"objective_ranks", c.preference.objective_ranks},
                 {"intensity", c.preference.intensity}};
    return j;
}

Dataset load_dataset(const ExperimentConfig& c) {
    if (c.system) {
        SystemSpec spec = benchmark_system(*c.system, c.seed);
        if (c.samples) spec.samples = c.samples;
        if (c.estimation_len) spec.estimation_len = c.estimation_len;
        return simulate(spec);
    }
    return load_csv(c.data_path, c.estimation_len, fs::path(c.data_path).stem().string());
}

// ---------------------------------------------------------------------------
// Search

SearchResult run_search(const ExperimentConfig& c, std::size_t workers) {
    c.validate();
    SearchResult r;
    r.data = load_dataset(c);
    r.spec = c.model_set;
    const ModelSet ms = generate_model_set(c.model_set.n_u, c.model_set.n_y, c.model_set.n_l);
    const std::string label = system_label(c);
    r.runs.resize(c.runs);
    r.run_seeds.resize(c.runs);
    for (std::size_t i = 0; i < c.runs; ++i) r.run_seeds[i] = derive_seed(c.seed, label, 0, i);

    parallel_for(c.runs, workers, [&](std::size_t i) {
        NarxProblem problem(ms, r.data, c.goal, c.error_mode);
        RunConfig rc = c.run;
        rc.seed = r.run_seeds[i];
        r.runs[i] = run_optimizer(rc, problem);
    });

    std::vector<ArchiveEntry> all;
    for (const auto& run : r.runs) all.insert(all.end(), run.archive.entries().begin(), run.archive.entries().end());
    r.pooled = archive_from(all);
    return r;
}

RankedFront rank_archive(const std::vector<ArchiveEntry>& entries, McdmMethod method, const PreferenceSpec& pref) {
    if (method == McdmMethod::mmd) return mmd_rank(entries);
    return mtd_rank(entries, preference_weights(pref));
}

json write_search_outputs(const ExperimentConfig& c, const SearchResult& r, const fs::path& out) {
    fs::create_directories(out / "runs");
    const ModelSet ms = generate_model_set(c.model_set.n_u, c.model_set.n_y, c.model_set.n_l);

    write_json(out / "config.json", experiment_config_to_json(c));
    write_csv(r.data, out / "dataset.csv");

    std::size_t evaluations = 0;
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        json j = archive_to_json(r.runs[i].archive.entries(), c.model_set);
        j["run"] = i + 1;
        j["seed"] = r.run_seeds[i];
        j["evaluations"] = r.runs[i].evaluations;
        j["generations"] = r.runs[i].generations;
        write_json(out / "runs" / run_file_name(i), j);
        evaluations += r.runs[i].evaluations;
    }
    const auto& pooled = r.pooled.entries();
    write_json(out / "pooled_archive.json", archive_to_json(pooled, c.model_set));

    json models = json::array();
    for (const auto& e : pooled) {
        json m = model_to_json(estimate_parameters(r.data, decode(e.genome, ms), c.model_set));
        m.erase("schema_version");
        m["bits"] = e.genome.to_string();
        m["xi"] = e.objectives.xi;
        m["nmse"] = e.objectives.nmse;
        models.push_back(std::move(m));
    }
    write_json(out / "pooled_models.json", {{"schema_version", kSchemaVersion}, {"models", models}});

    json summary = {{"schema_version", kSchemaVersion},
                    {"system", system_label(c)},
                    {"runs", c.runs},
                    {"seed", c.seed},
                    {"evaluations", evaluations},
                    {"pooled_size", pooled.size()}};
    if (pooled.empty()) {
        write_json(out / "summary.json", summary);
        return summary;
    }

    const auto mmd = mmd_rank(pooled);
    write_ranked_csv(out / "ranking_mmd.csv", mmd);
    std::optional<RankedFront> mtd;
    if (pooled.size() >= 2) {
        mtd = mtd_rank(pooled, preference_weights(c.preference));
        write_ranked_csv(out / "ranking_mtd.csv", *mtd);
    }
    const RankedFront& chosen = c.mcdm == McdmMethod::mtd && mtd ? *mtd : mmd;
    summary["method"] = to_string(chosen.method);
    summary["top"] = ranked_to_json(chosen, ms, 5);

    write_ic_csv(out / "ic.csv", information_criteria(pooled, ms, r.data));

    const auto& best = chosen.entries.front();
    const auto refined =
        refine_structure(estimate_parameters(r.data, decode(best.genome, ms), c.model_set), r.data, c.alpha);
    json knee = model_to_json(refined.model);
    knee["bits"] = best.genome.to_string();
    knee["degenerate"] = refined.degenerate;
    json removed = json::array();
    for (const auto& t : refined.removed) removed.push_back(t.to_string());
    knee["removed"] = removed;
    write_json(out / "knee.json", knee);

    json ks = {{"bits", best.genome.to_string()}, {"xi", best.objectives.xi}, {"nmse", best.objectives.nmse}};
    json rt = json::array();
    for (const auto& t : refined.model.structure) rt.push_back(t.to_string());
    ks["refined_terms"] = rt;

    if (c.system && *c.system <= SystemId::S7) {
        const auto truth = true_structure(*c.system);
        const auto table = outcome_table(pooled, ms, truth, r.data, c.alpha);
        write_outcomes_csv(out / "outcomes.csv", table);
        json oc;
        for (auto l : kOutcomeLabels) oc[to_string(l)] = table[l];
        oc["total"] = table.total;
        summary["outcomes"] = oc;
        ks["outcome"] = to_string(classify_outcome(refined.model.structure, truth));
    }
    summary["knee"] = ks;
    write_json(out / "summary.json", summary);
    return summary;
}

json cmd_search(const ExperimentConfig& c, std::size_t workers, const fs::path& out) {
    return write_search_outputs(c, run_search(c, workers), out);
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<double> SweepConfig::default_p_c() {
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) v.push_back(i / 10.0);
    return v;
}

std::vector<double> SweepConfig::default_p_m() {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(0.001 + i * (0.0199 - 0.001) / 9.0);
    return v;
}

void SweepConfig::validate() const {
    if (p_c.empty()) throw ConfigError("p_c", "must not be empty");
    if (p_m.empty()) throw ConfigError("p_m", "must not be empty");
    for (double v : p_c)
        if (!(v >= 0 && v <= 1)) throw ConfigError("p_c", "values must lie in [0, 1]");
    for (double v : p_m)
        if (!(v >= 0 && v <= 1)) throw ConfigError("p_m", "values must lie in [0, 1]");
    if (systems.empty()) throw ConfigError("systems", "must not be empty");
    for (auto s : systems)
        if (s > SystemId::duffing) throw ConfigError("systems", "only built-in systems can be swept");
    if (runs < 1) throw ConfigError("runs", "must be >= 1");
    if (crossovers.empty() || crossovers.size() > 2) throw ConfigError("crossovers", "give one or two crossovers");
    if (crossovers.size() == 2 && crossovers[0] == crossovers[1])
        throw ConfigError("crossovers", "the two crossovers must differ");
    wrap("goal", [&] { goal.validate(); });
    wrap("run", [&] { run.validate(); });
}

SweepConfig parse_sweep_config(const json& j) {
    Fields f(j, "");
    SweepConfig c;
    if (j.contains("schema_version")) f.need<int>("schema_version");
    c.p_c = f.get<std::vector<double>>("p_c", SweepConfig::default_p_c());
    c.p_m = f.get<std::vector<double>>("p_m", SweepConfig::default_p_m());
    if (f.has("systems")) {
        c.systems.clear();
        for (const auto& s : f.need<std::vector<std::string>>("systems"))
            c.systems.push_back(wrap("systems", [&] { return parse_system_id(s); }));
    }
    c.runs = f.get<std::size_t>("runs", c.runs);
    if (f.has("crossovers")) {
        c.crossovers.clear();
        for (const auto& s : f.need<std::vector<std::string>>("crossovers"))
            c.crossovers.push_back(wrap("crossovers", [&] { return parse_crossover(s); }));
    }
    if (f.has("run")) c.run = parse_run_config(f.raw("run"), "run");
    if (f.has("model_set")) c.model_set = parse_model_set(f.raw("model_set"), "model_set");
    if (f.has("goal")) c.goal = parse_goal(f.raw("goal"), "goal");
    if (f.has("error_mode")) c.error_mode = parse_error_mode(f.need<std::string>("error_mode"), "error_mode");
    c.seed = f.get<std::uint64_t>("seed", c.seed);
    f.finish();
    c.validate();
    return c;
}

json sweep_config_to_json(const SweepConfig& c) {
    json sys = json::array();
    for (auto s : c.systems) sys.push_back(to_string(s));
    json xo = json::array();
    for (auto x : c.crossovers) xo.push_back(to_string(x));
    json r = run_config_to_json(c.run);
    r.erase("p_c");
    r.erase("p_m");
    r.erase("crossover");
    return {{"schema_version", kSchemaVersion},
            {"p_c", c.p_c},
            {"p_m", c.p_m},
            {"systems", sys},
            {"runs", c.runs},
            {"crossovers", xo},
            {"run", r},
            {"model_set", model_set_to_json(c.model_set)},
            {"goal", {{"xi_lim", c.goal.xi_lim}, {"nmse_lim", c.goal.nmse_lim}}},
            {"error_mode", error_mode_name(c.error_mode)},
            {"seed", c.seed}};
}

SweepResult run_sweep(const SweepConfig& c, std::size_t workers) {
    c.validate();
    const ModelSet ms = generate_model_set(c.model_set.n_u, c.model_set.n_y, c.model_set.n_l);
    const std::size_t X = c.crossovers.size(), S = c.systems.size(), C = c.cells(), R = c.runs;

    std::vector<Dataset> data;
    for (auto s : c.systems) data.push_back(simulate(benchmark_system(s, c.seed)));

    // One task per (crossover, system, cell, run).
    const std::size_t tasks = X * S * C * R;
    std::vector<RunResult> results(tasks);
    parallel_for(tasks, workers, [&](std::size_t t) {
        const std::size_t run = t % R, cell = (t / R) % C, s = (t / (R * C)) % S, x = t / (R * C * S);
        NarxProblem problem(ms, data[s], c.goal, c.error_mode);
        RunConfig rc = c.run;
        rc.p_c = c.p_c[cell / c.p_m.size()];
        rc.p_m = c.p_m[cell % c.p_m.size()];
        rc.crossover = c.crossovers[x];
        rc.seed = derive_seed(c.seed, to_string(c.systems[s]), cell, run);
        results[t] = run_optimizer(rc, problem);
    });

    SweepResult out;
    auto& st = out;
    st.archives.assign(X, std::vector<std::vector<ParetoArchive>>(S, std::vector<ParetoArchive>(C)));
    st.ideal.assign(S, ParetoArchive{});
    for (std::size_t t = 0; t < tasks; ++t) {
        const std::size_t cell = (t / R) % C, s = (t / (R * C)) % S, x = t / (R * C * S);
        for (const auto& e : results[t].archive.entries()) st.archives[x][s][cell].insert(e);
        out.evaluations += results[t].evaluations;
        ++out.runs_executed;
    }
    for (std::size_t x = 0; x < X; ++x)
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t cell = 0; cell < C; ++cell) {
                st.archives[x][s][cell].sort();
                for (const auto& e : st.archives[x][s][cell].entries()) st.ideal[s].insert(e);
            }
    for (auto& a : st.ideal) a.sort();

    out.hvr.assign(X, std::vector<std::vector<double>>(S, std::vector<double>(C, 0.0)));
    out.pm_mean.assign(X, std::vector<double>(C, 0.0));
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<FrontSnapshot> fronts;
        for (std::size_t x = 0; x < X; ++x)
            for (std::size_t cell = 0; cell < C; ++cell) fronts.push_back(snapshot(st.archives[x][s][cell].entries()));
        const auto hv = hv_ratios(fronts, snapshot(st.ideal[s].entries()));
        for (std::size_t x = 0; x < X; ++x)
            for (std::size_t cell = 0; cell < C; ++cell) {
                out.hvr[x][s][cell] = hv[x * C + cell];
                out.pm_mean[x][cell] += hv[x * C + cell] / static_cast<double>(S);
            }
    }
    return out;
}

json sweep_wilcoxon(const SweepConfig& c, const SweepResult& r) {
    if (c.crossovers.size() != 2) throw ArgumentError("wilcoxon comparison needs exactly two crossovers");
    json j = {{"schema_version", kSchemaVersion},
              {"alternative", "greater"},
              {"x", to_string(c.crossovers[1])},
              {"y", to_string(c.crossovers[0])}};
    auto one = [](const std::vector<double>& x, const std::vector<double>& y) -> json {
        try {
            json rep = report_to_json(wilcoxon_signed_rank(x, y, Alternative::greater));
            rep.erase("schema_version");
            return rep;
        } catch (const ArgumentError& e) {
            return {{"skipped", e.what()}};
        }
    };
    std::vector<double> ax, ay;
    json per = json::array();
    for (std::size_t s = 0; s < c.systems.size(); ++s) {
        const auto& x = r.hvr[1][s];
        const auto& y = r.hvr[0][s];
        ax.insert(ax.end(), x.begin(), x.end());
        ay.insert(ay.end(), y.begin(), y.end());
        json e = one(x, y);
        e["system"] = to_string(c.systems[s]);
        per.push_back(std::move(e));
    }
    j["per_system"] = per;
    j["pooled"] = one(ax, ay);
    return j;
}

json write_sweep_outputs(const SweepConfig& c, const SweepResult& r, const fs::path& out) {
    fs::create_directories(out);
    write_json(out / "config.json", sweep_config_to_json(c));
    const std::size_t C = c.cells();
    {
        std::ofstream f(out / "pm.csv", std::ios::binary);
        f << "crossover,system,pc,pm,hvr\n";
        for (std::size_t x = 0; x < c.crossovers.size(); ++x)
            for (std::size_t s = 0; s < c.systems.size(); ++s)
                for (std::size_t cell = 0; cell < C; ++cell)
                    f << to_string(c.crossovers[x]) << ',' << to_string(c.systems[s]) << ','
                      << format_double(c.p_c[cell / c.p_m.size()]) << ',' << format_double(c.p_m[cell % c.p_m.size()])
                      << ',' << format_double(r.hvr[x][s][cell]) << '\n';
    }
    for (std::size_t x = 0; x < c.crossovers.size(); ++x) {
        std::ofstream f(out / ("sweep_" + to_string(c.crossovers[x]) + ".csv"), std::ios::binary);
        f << "pc,pm,pm_mean\n";
        for (std::size_t cell = 0; cell < C; ++cell)
            f << format_double(c.p_c[cell / c.p_m.size()]) << ',' << format_double(c.p_m[cell % c.p_m.size()]) << ','
              << format_double(r.pm_mean[x][cell]) << '\n';
    }

    const auto& st = r;
    if (st.archives.size() == c.crossovers.size()) {
        for (std::size_t s = 0; s < c.systems.size(); ++s) {
            const std::string sys = to_string(c.systems[s]);
            write_json(out / ("ideal_" + sys + ".json"), archive_to_json(st.ideal[s].entries(), c.model_set));
            for (std::size_t x = 0; x < c.crossovers.size(); ++x) {
                json cells = json::array();
                for (std::size_t cell = 0; cell < C; ++cell) {
                    json a = archive_to_json(st.archives[x][s][cell].entries(), c.model_set);
                    cells.push_back({{"p_c", c.p_c[cell / c.p_m.size()]},
                                     {"p_m", c.p_m[cell % c.p_m.size()]},
                                     {"entries", a["entries"]}});
                }
                write_json(out / ("archives_" + to_string(c.crossovers[x]) + "_" + sys + ".json"),
                           {{"schema_version", kSchemaVersion},
                            {"model_set", model_set_to_json(c.model_set)},
                            {"cells", cells}});
            }
        }
    }

    json audit = {{"schema_version", kSchemaVersion},
                  {"cells", C},
                  {"systems", c.systems.size()},
                  {"crossovers", c.crossovers.size()},
                  {"runs_per_cell", c.runs},
                  {"runs_expected", c.crossovers.size() * c.systems.size() * C * c.runs},
                  {"runs_executed", r.runs_executed},
                  {"fe_budget_per_run", c.run.fe_budget},
                  {"evaluations", r.evaluations}};
    write_json(out / "audit.json", audit);

    json summary = {{"schema_version", kSchemaVersion}, {"cells", C}, {"runs_executed", r.runs_executed}};
    json best = json::object();
    for (std::size_t x = 0; x < c.crossovers.size(); ++x) {
        const auto it = std::max_element(r.pm_mean[x].begin(), r.pm_mean[x].end());
        const std::size_t cell = static_cast<std::size_t>(it - r.pm_mean[x].begin());
        best[to_string(c.crossovers[x])] = {
            {"p_c", c.p_c[cell / c.p_m.size()]}, {"p_m", c.p_m[cell % c.p_m.size()]}, {"pm_mean", *it}};
    }
    summary["best_cell"] = best;
    if (c.crossovers.size() == 2) {
        // Numeric two-column form of the PM pairs, readable by `stats wilcoxon`.
        std::ofstream f(out / "pm_paired.csv", std::ios::binary);
        f << to_string(c.crossovers[1]) << ',' << to_string(c.crossovers[0]) << '\n';
        for (std::size_t s = 0; s < c.systems.size(); ++s)
            for (std::size_t cell = 0; cell < C; ++cell)
                f << format_double(r.hvr[1][s][cell]) << ',' << format_double(r.hvr[0][s][cell]) << '\n';
        f.close();
        const json w = sweep_wilcoxon(c, r);
        write_json(out / "wilcoxon.json", w);
        summary["wilcoxon"] = w["pooled"];
    }
    write_json(out / "summary.json", summary);
    return summary;
}

json cmd_sweep(const SweepConfig& c, std::size_t workers, const fs::path& out) {
    return write_sweep_outputs(c, run_sweep(c, workers), out);
}

// ---------------------------------------------------------------------------

EstimatedModel duffing_reference_model(const std::string& name) {
    const Term y1 = Term::y(1), y2 = Term::y(2), y3 = Term::y(3), u1 = Term::u(1), u2 = Term::u(2);
    EstimatedModel m;
    m.source = {2, 3, 3};
    m.structure = {y1, y2, u1, u2, y1 * y1 * y1};
    m.coefficients = {1.9152, -0.99436, 1.983e-6, 1.9792e-6, -0.23154};
    if (name == "md1") return m;
    if (name == "md2") {
        m.coefficients[4] = -0.22981;
        m.structure.push_back(y3 * y3 * y3);
        m.coefficients.push_back(-3.4686e-3);
        return m;
    }
    if (name == "md3") {
        m.coefficients[4] = -0.25637;
        m.structure.push_back(y3 * y1 * y1);
        m.coefficients.push_back(5.4467e-2);
        m.structure.push_back(y1 * y3 * y3);
        m.coefficients.push_back(-3.191e-2);
        return m;
    }
    throw ArgumentError("unknown reference model '" + name + "' (expected md1, md2 or md3)");
}

}  // namespace narxmo
