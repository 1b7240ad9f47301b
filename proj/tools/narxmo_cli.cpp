// Command-line front end. Talks to the library only through the C API.
#include "narxmo/narxmo.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Failure {
    int code;
    std::string message;
};

int exit_code(narxmo_status s) {
    switch (s) {
        case NARXMO_OK: return kExitOk;
        case NARXMO_E_ARGUMENT:
        case NARXMO_E_PARSE:
        case NARXMO_E_CONFIG: return kExitConfig;
        default: return kExitRuntime;
    }
}

void check(narxmo_status s) {
    if (s != NARXMO_OK) throw Failure{exit_code(s), narxmo_last_error()};
}

// Owns a string handed out by the library.
struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { narxmo_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    ~Handle() { Free(p); }
};

using ModelSetH = Handle<narxmo_model_set, narxmo_model_set_free>;
using DatasetH = Handle<narxmo_dataset, narxmo_dataset_free>;
using ArchiveH = Handle<narxmo_archive, narxmo_archive_free>;
using ModelH = Handle<narxmo_model, narxmo_model_free>;

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::string out = "results";
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{kExitConfig, "cannot open config file " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Loads the config and applies the --seed override.
std::string load_config(const Globals& g) {
    if (g.config.empty()) throw Failure{kExitConfig, "--config is required"};
    json j;
    try {
        j = json::parse(read_text(g.config));
    } catch (const json::parse_error& e) {
        throw Failure{kExitConfig, g.config + ": " + e.what()};
    }
    if (g.seed) {
        if (!j.is_object()) throw Failure{kExitConfig, g.config + ": expected an object"};
        j["seed"] = *g.seed;
    }
    return j.dump();
}

void reject_config(const Globals& g, const char* cmd) {
    if (!g.config.empty()) throw Failure{kExitConfig, std::string("--config is not used by '") + cmd + "'"};
}

fs::path out_file(const Globals& g, const std::string& name) {
    fs::create_directories(g.out);
    return fs::path(g.out) / name;
}

void emit(const OwnedString& s) { std::cout << s.str() << '\n'; }

std::vector<int> parse_ranks(const std::string& s) {
    std::vector<int> r;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            r.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw Failure{kExitConfig, "--ranks: not an integer list: " + s};
        }
    }
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective evolutionary NARX structure selection"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "Experiment configuration (JSON)");
    app.add_option("--seed", g.seed, "Master seed; overrides the config");
    app.add_option("--workers", g.workers, "Concurrent runs")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory")->capture_default_str();

    int n_u = 4, n_y = 4, n_l = 3;
    auto* terms = app.add_subcommand("terms", "List the candidate term set");
    terms->add_option("--n-u", n_u)->capture_default_str();
    terms->add_option("--n-y", n_y)->capture_default_str();
    terms->add_option("--n-l", n_l)->capture_default_str();

    std::string system;
    std::size_t samples = 0, estimation_len = 0;
    auto* sim = app.add_subcommand("simulate", "Generate a benchmark dataset");
    sim->add_option("--system", system, "S1..S7 or duffing")->required();
    sim->add_option("--samples", samples, "0 keeps the system default");
    sim->add_option("--estimation-len", estimation_len, "0 keeps the system default");

    auto* search = app.add_subcommand("search", "Multi-run structure search");
    auto* sweep = app.add_subcommand("sweep", "Crossover / mutation probability sweep");

    std::string archive_path, method = "mmd", ranks = "1,2";
    double intensity = 5.0;
    std::size_t top = 5;
    auto* rank = app.add_subcommand("rank", "Rank an archive with MMD or MTD");
    rank->add_option("--archive", archive_path)->required()->check(CLI::ExistingFile);
    rank->add_option("--method", method)->check(CLI::IsMember({"mmd", "mtd"}))->capture_default_str();
    rank->add_option("--ranks", ranks, "Objective ranks, comma separated")->capture_default_str();
    rank->add_option("--intensity", intensity)->capture_default_str();
    rank->add_option("--top", top)->capture_default_str();

    std::string data_path;
    double alpha = 0.05;
    auto* classify = app.add_subcommand("classify", "Outcome table of an archive against a true structure");
    classify->add_option("--archive", archive_path)->required()->check(CLI::ExistingFile);
    classify->add_option("--system", system, "S1..S7")->required();
    classify->add_option("--data", data_path, "Dataset CSV; default simulates the system with --seed")
        ->check(CLI::ExistingFile);
    classify->add_option("--estimation-len", estimation_len, "0: 70% of the CSV");
    classify->add_option("--alpha", alpha)->capture_default_str();

    std::string input, test, order = "smallest_first", alternative = "greater";
    std::size_t control = 0;
    auto* stats = app.add_subcommand("stats", "Friedman, Hommel or Wilcoxon on a CSV matrix");
    stats->add_option("--input", input)->required()->check(CLI::ExistingFile);
    stats->add_option("--test", test)->required()->check(CLI::IsMember({"friedman", "hommel", "wilcoxon"}));
    stats->add_option("--order", order)->check(CLI::IsMember({"smallest_first", "largest_first"}))->capture_default_str();
    stats->add_option("--control", control, "Control column for hommel")->capture_default_str();
    stats->add_option("--alpha", alpha)->capture_default_str();
    stats->add_option("--alternative", alternative)->check(CLI::IsMember({"greater", "two_sided"}))->capture_default_str();

    std::string model_path, reference;
    double fs = 500.0;
    std::size_t points = 2048;
    auto* frf = app.add_subcommand("frf", "Linear frequency response of a model");
    auto* model_opt = frf->add_option("--model", model_path, "Model JSON")->check(CLI::ExistingFile);
    auto* ref_opt = frf->add_option("--reference", reference, "md1, md2 or md3");
    model_opt->excludes(ref_opt);
    frf->add_option("--fs", fs, "Sampling rate in Hz")->capture_default_str();
    frf->add_option("--points", points)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        OwnedString result;
        if (*terms) {
            reject_config(g, "terms");
            ModelSetH ms;
            check(narxmo_model_set_create(n_u, n_y, n_l, &ms.p));
            check(narxmo_model_set_to_json(ms.p, &result.p));
            const json j = json::parse(result.str());
            std::ofstream csv(out_file(g, "terms.csv"));
            csv << "index,term\n";
            std::size_t i = 0;
            for (const auto& t : j.at("terms")) csv << i++ << ',' << t.get<std::string>() << '\n';
            json summary = {{"schema_version", j.at("schema_version")}, {"model_set", j.at("model_set")},
                            {"count", j.at("count")}};
            std::cout << summary.dump(2) << '\n';
        } else if (*sim) {
            reject_config(g, "simulate");
            DatasetH d;
            check(narxmo_dataset_simulate(system.c_str(), g.seed.value_or(1), samples, estimation_len, &d.p));
            const auto path = out_file(g, system + ".csv");
            check(narxmo_dataset_write_csv(d.p, path.string().c_str()));
            json summary = {{"schema_version", 1},
                            {"system", system},
                            {"samples", narxmo_dataset_size(d.p)},
                            {"estimation_len", narxmo_dataset_estimation_len(d.p)},
                            {"path", path.string()}};
            std::cout << summary.dump(2) << '\n';
        } else if (*search) {
            check(narxmo_search(load_config(g).c_str(), g.workers, g.out.c_str(), &result.p));
            emit(result);
        } else if (*sweep) {
            check(narxmo_sweep(load_config(g).c_str(), g.workers, g.out.c_str(), &result.p));
            emit(result);
        } else if (*rank) {
            reject_config(g, "rank");
            ArchiveH a;
            check(narxmo_archive_read(archive_path.c_str(), &a.p));
            const auto r = parse_ranks(ranks);
            const auto path = out_file(g, "ranking_" + method + ".csv");
            check(narxmo_rank(a.p, method.c_str(), r.data(), r.size(), intensity, top, path.string().c_str(),
                              &result.p));
            emit(result);
        } else if (*classify) {
            reject_config(g, "classify");
            ArchiveH a;
            check(narxmo_archive_read(archive_path.c_str(), &a.p));
            DatasetH d;
            if (data_path.empty())
                check(narxmo_dataset_simulate(system.c_str(), g.seed.value_or(1), 0, 0, &d.p));
            else
                check(narxmo_dataset_load_csv(data_path.c_str(), estimation_len, &d.p));
            check(narxmo_classify(a.p, system.c_str(), d.p, alpha, out_file(g, "outcomes.csv").string().c_str(),
                                  &result.p));
            emit(result);
        } else if (*stats) {
            reject_config(g, "stats");
            json opt = {{"order", order}, {"control", control}, {"alpha", alpha}, {"alternative", alternative}};
            check(narxmo_stats(input.c_str(), test.c_str(), opt.dump().c_str(), &result.p));
            std::ofstream(out_file(g, test + ".json")) << result.str() << '\n';
            emit(result);
        } else if (*frf) {
            reject_config(g, "frf");
            ModelH m;
            if (!model_path.empty())
                check(narxmo_model_read(model_path.c_str(), &m.p));
            else if (!reference.empty())
                check(narxmo_model_reference(reference.c_str(), &m.p));
            else
                throw Failure{kExitConfig, "frf needs --model or --reference"};
            check(narxmo_frf(m.p, fs, points, out_file(g, "frf.csv").string().c_str(), &result.p));
            emit(result);
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
