#include "narxmo/narxmo.h"

#include "narxmo/error.hpp"
#include "narxmo/pipeline.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>

using namespace narxmo;

struct narxmo_model_set {
    ModelSetSpec spec;
    ModelSet ms;
};
struct narxmo_dataset {
    Dataset data;
};
struct narxmo_archive {
    ArchiveFile file;
};
struct narxmo_model {
    EstimatedModel model;
};

namespace {

thread_local std::string g_last_error;

narxmo_status fail(narxmo_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

// Maps the library's exception types onto status codes.
template <typename F>
narxmo_status guard(F&& f) {
    try {
        f();
        g_last_error.clear();
        return NARXMO_OK;
    } catch (const ConfigError& e) {
        return fail(NARXMO_E_CONFIG, e.what());
    } catch (const ParseError& e) {
        return fail(NARXMO_E_PARSE, e.what());
    } catch (const json::exception& e) {
        return fail(NARXMO_E_PARSE, e.what());
    } catch (const ArgumentError& e) {
        return fail(NARXMO_E_ARGUMENT, e.what());
    } catch (const DegenerateDataError& e) {
        return fail(NARXMO_E_DEGENERATE, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(NARXMO_E_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(NARXMO_E_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(NARXMO_E_RUNTIME, e.what());
    } catch (...) {
        return fail(NARXMO_E_RUNTIME, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void put_json(char** out, const json& j) {
    if (out) *out = dup_string(j.dump(2));
}

void require(const void* p, const char* what) {
    if (!p) throw ArgumentError(std::string(what) + " must not be NULL");
}

PreferenceSpec make_preference(const int* ranks, std::size_t n, double intensity) {
    PreferenceSpec p;
    if (n) {
        require(ranks, "objective_ranks");
        p.objective_ranks.assign(ranks, ranks + n);
    }
    p.intensity = intensity;
    p.validate();
    return p;
}

json parse_text(const char* text) {
    require(text, "config_json");
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<config>", e.what());
    }
}

}  // namespace

extern "C" {

const char* narxmo_last_error(void) { return g_last_error.c_str(); }

const char* narxmo_version(void) { return "1.0.0"; }

void narxmo_string_free(char* s) { std::free(s); }

narxmo_status narxmo_model_set_create(int n_u, int n_y, int n_l, narxmo_model_set** out) {
    return guard([&] {
        require(out, "out");
        *out = new narxmo_model_set{{n_u, n_y, n_l}, generate_model_set(n_u, n_y, n_l)};
    });
}

void narxmo_model_set_free(narxmo_model_set* ms) { delete ms; }

size_t narxmo_model_set_size(const narxmo_model_set* ms) { return ms ? ms->ms.size() : 0; }

narxmo_status narxmo_model_set_to_json(const narxmo_model_set* ms, char** json_out) {
    return guard([&] {
        require(ms, "model_set");
        json terms = json::array();
        for (std::size_t i = 0; i < ms->ms.size(); ++i) terms.push_back(ms->ms[i].to_string());
        put_json(json_out, {{"schema_version", kSchemaVersion},
                            {"model_set", model_set_to_json(ms->spec)},
                            {"count", ms->ms.size()},
                            {"terms", terms}});
    });
}

narxmo_status narxmo_dataset_simulate(const char* system, uint64_t seed, size_t samples, size_t estimation_len,
                                      narxmo_dataset** out) {
    return guard([&] {
        require(system, "system");
        require(out, "out");
        SystemSpec spec = benchmark_system(parse_system_id(system), seed);
        if (samples) spec.samples = samples;
        if (estimation_len) spec.estimation_len = estimation_len;
        *out = new narxmo_dataset{simulate(spec)};
    });
}

narxmo_status narxmo_dataset_load_csv(const char* path, size_t estimation_len, narxmo_dataset** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new narxmo_dataset{load_csv(path, estimation_len, std::filesystem::path(path).stem().string())};
    });
}

narxmo_status narxmo_dataset_write_csv(const narxmo_dataset* d, const char* path) {
    return guard([&] {
        require(d, "dataset");
        require(path, "path");
        write_csv(d->data, path);
    });
}

size_t narxmo_dataset_size(const narxmo_dataset* d) { return d ? d->data.size() : 0; }

size_t narxmo_dataset_estimation_len(const narxmo_dataset* d) { return d ? d->data.estimation_len : 0; }

void narxmo_dataset_free(narxmo_dataset* d) { delete d; }

narxmo_status narxmo_archive_read(const char* path, narxmo_archive** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new narxmo_archive{read_archive(path)};
    });
}

size_t narxmo_archive_size(const narxmo_archive* a) { return a ? a->file.entries.size() : 0; }

void narxmo_archive_free(narxmo_archive* a) { delete a; }

narxmo_status narxmo_model_read(const char* path, narxmo_model** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new narxmo_model{read_model(path)};
    });
}

narxmo_status narxmo_model_reference(const char* name, narxmo_model** out) {
    return guard([&] {
        require(name, "name");
        require(out, "out");
        *out = new narxmo_model{duffing_reference_model(name)};
    });
}

narxmo_status narxmo_model_to_json(const narxmo_model* m, char** json_out) {
    return guard([&] {
        require(m, "model");
        put_json(json_out, model_to_json(m->model));
    });
}

void narxmo_model_free(narxmo_model* m) { delete m; }

narxmo_status narxmo_preference_weights(const int* objective_ranks, size_t n_ranks, double intensity,
                                        double* weights) {
    return guard([&] {
        require(weights, "weights");
        const auto w = preference_weights(make_preference(objective_ranks, n_ranks, intensity));
        std::copy(w.begin(), w.end(), weights);
    });
}

narxmo_status narxmo_search(const char* config_json, size_t workers, const char* out_dir, char** summary_out) {
    return guard([&] {
        require(out_dir, "out_dir");
        const auto cfg = parse_experiment_config(parse_text(config_json));
        put_json(summary_out, cmd_search(cfg, workers, out_dir));
    });
}

narxmo_status narxmo_sweep(const char* config_json, size_t workers, const char* out_dir, char** summary_out) {
    return guard([&] {
        require(out_dir, "out_dir");
        const auto cfg = parse_sweep_config(parse_text(config_json));
        put_json(summary_out, cmd_sweep(cfg, workers, out_dir));
    });
}

narxmo_status narxmo_rank(const narxmo_archive* a, const char* method, const int* objective_ranks, size_t n_ranks,
                          double intensity, size_t top, const char* csv_path, char** json_out) {
    return guard([&] {
        require(a, "archive");
        require(method, "method");
        if (a->file.entries.empty()) throw ArgumentError("archive is empty");
        const auto m = parse_mcdm_method(method);
        const auto pref = make_preference(objective_ranks, n_ranks, intensity);
        const auto rf = rank_archive(a->file.entries, m, pref);
        if (csv_path) write_ranked_csv(csv_path, rf);

        const ModelSet ms = generate_model_set(a->file.spec.n_u, a->file.spec.n_y, a->file.spec.n_l);
        json entries = json::array();
        for (std::size_t i = 0; i < rf.entries.size() && i < top; ++i) {
            const auto& e = rf.entries[i];
            json terms = json::array();
            for (const auto& t : decode(e.genome, ms)) terms.push_back(t.to_string());
            entries.push_back({{"rank", i + 1},
                               {"xi", e.objectives.xi},
                               {"nmse", e.objectives.nmse},
                               {"score", e.score},
                               {"bits", e.genome.to_string()},
                               {"terms", terms}});
        }
        json j = {{"schema_version", kSchemaVersion},
                  {"method", to_string(m)},
                  {"ranked", rf.entries.size()},
                  {"top", entries}};
        if (m == McdmMethod::mtd) j["weights"] = preference_weights(pref);
        put_json(json_out, j);
    });
}

narxmo_status narxmo_classify(const narxmo_archive* a, const char* system, const narxmo_dataset* d, double alpha,
                              const char* csv_path, char** json_out) {
    return guard([&] {
        require(a, "archive");
        require(system, "system");
        require(d, "dataset");
        const auto id = parse_system_id(system);
        if (id > SystemId::S7) throw ArgumentError("no known true structure for system '" + std::string(system) + "'");
        if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
        const ModelSet ms = generate_model_set(a->file.spec.n_u, a->file.spec.n_y, a->file.spec.n_l);
        const auto table = outcome_table(a->file.entries, ms, true_structure(id), d->data, alpha);
        if (csv_path) write_outcomes_csv(csv_path, table);
        json counts;
        for (auto l : kOutcomeLabels) counts[to_string(l)] = table[l];
        put_json(json_out, {{"schema_version", kSchemaVersion},
                            {"system", to_string(id)},
                            {"alpha", alpha},
                            {"total", table.total},
                            {"counts", counts}});
    });
}

narxmo_status narxmo_stats(const char* csv_path, const char* test, const char* options_json, char** json_out) {
    return guard([&] {
        require(csv_path, "csv_path");
        require(test, "test");
        json opt = json::object();
        if (options_json && *options_json) opt = json::parse(options_json);
        if (!opt.is_object()) throw ArgumentError("options must be a JSON object");
        for (const auto& [k, v] : opt.items())
            if (k != "order" && k != "control" && k != "alpha" && k != "alternative")
                throw ArgumentError("unknown stats option '" + k + "'");

        std::vector<std::string> header;
        const auto rows = read_matrix_csv(csv_path, &header);
        const std::string name = test;
        json j;
        if (name == "friedman" || name == "hommel") {
            RankOrder order = RankOrder::smallest_first;
            const std::string o = opt.value("order", "smallest_first");
            if (o == "largest_first")
                order = RankOrder::largest_first;
            else if (o != "smallest_first")
                throw ArgumentError("order must be 'smallest_first' or 'largest_first'");
            const auto fr = friedman(rows, order);
            j = report_to_json(fr);
            if (name == "hommel") {
                const auto control = opt.value("control", std::size_t{0});
                const auto ph = hommel_posthoc(fr.mean_ranks, rows.size(), control, opt.value("alpha", 0.05));
                json p = report_to_json(ph);
                p.erase("schema_version");
                j["posthoc"] = p;
            }
        } else if (name == "wilcoxon") {
            if (header.size() < 2) throw ArgumentError("wilcoxon needs two columns");
            std::vector<double> x, y;
            for (const auto& r : rows) {
                x.push_back(r[0]);
                y.push_back(r[1]);
            }
            j = report_to_json(wilcoxon_signed_rank(x, y, parse_alternative(opt.value("alternative", "greater"))));
            j["x"] = header[0];
            j["y"] = header[1];
        } else {
            throw ArgumentError("unknown test '" + name + "' (expected friedman, hommel or wilcoxon)");
        }
        j["columns"] = header;
        put_json(json_out, j);
    });
}

narxmo_status narxmo_frf(const narxmo_model* m, double fs, size_t n_points, const char* csv_path, char** json_out) {
    return guard([&] {
        require(m, "model");
        const auto frf = linear_frf(m->model, fs, frequency_grid(fs, n_points ? n_points : kDefaultFrfPoints));
        if (csv_path) write_frf_csv(csv_path, frf);
        json j = {{"schema_version", kSchemaVersion},
                  {"fs", fs},
                  {"points", frf.frequencies.size()},
                  {"degenerate", frf.degenerate}};
        j["peak_hz"] = frf.degenerate ? json(nullptr) : json(frf.peak_frequency());
        const auto pole = resonance_from_poles(m->model, fs);
        j["pole_resonance_hz"] = pole ? json(*pole) : json(nullptr);
        put_json(json_out, j);
    });
}

}  // extern "C"
