#include "narxmo/io.hpp"

#include "narxmo/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace narxmo {

namespace fs = std::filesystem;

namespace {

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json model_set_to_json(const ModelSetSpec& s) { return {{"n_u", s.n_u}, {"n_y", s.n_y}, {"n_l", s.n_l}}; }

ModelSetSpec model_set_from_json(const json& j) {
    try {
        return {need(j, "n_u").get<int>(), need(j, "n_y").get<int>(), need(j, "n_l").get<int>()};
    } catch (const json::exception& e) {
        throw ParseError(std::string("model_set: ") + e.what());
    }
}

json term_to_json(const Term& t) {
    json f = json::array();
    for (const auto& x : t.factors()) f.push_back({{"signal", x.signal == Signal::output ? "y" : "u"}, {"lag", x.lag}});
    return {{"name", t.to_string()}, {"factors", f}};
}

Term term_from_json(const json& j) {
    std::vector<Factor> fs;
    try {
        for (const auto& x : need(j, "factors")) {
            const auto sig = need(x, "signal").get<std::string>();
            if (sig != "y" && sig != "u") throw ParseError("term factor signal must be 'y' or 'u'");
            const int lag = need(x, "lag").get<int>();
            if (lag < 1) throw ParseError("term factor lag must be >= 1");
            fs.push_back({sig == "y" ? Signal::output : Signal::input, lag});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("term: ") + e.what());
    }
    return Term(std::move(fs));
}

json archive_to_json(const std::vector<ArchiveEntry>& entries, const ModelSetSpec& spec) {
    json arr = json::array();
    for (const auto& e : entries)
        arr.push_back({{"bits", e.genome.to_string()},
                       {"xi", e.objectives.xi},
                       {"nmse", e.objectives.nmse},
                       {"j1", e.objectives.j1},
                       {"j2", e.objectives.j2}});
    return {{"schema_version", kSchemaVersion}, {"model_set", model_set_to_json(spec)}, {"entries", arr}};
}

ArchiveFile archive_from_json(const json& j) {
    ArchiveFile a;
    a.spec = model_set_from_json(need(j, "model_set"));
    const std::size_t n = term_count(a.spec.n_u, a.spec.n_y, a.spec.n_l);
    try {
        for (const auto& x : need(j, "entries")) {
            ArchiveEntry e;
            e.genome = Genome::from_string(need(x, "bits").get<std::string>());
            if (e.genome.size() != n) throw ParseError("archive entry bit string does not match the model set");
            e.objectives.xi = need(x, "xi").get<int>();
            if (static_cast<std::size_t>(e.objectives.xi) != e.genome.count())
                throw ParseError("archive entry xi does not match its bit count");
            e.objectives.nmse = need(x, "nmse").get<double>();
            e.objectives.j1 = need(x, "j1").get<double>();
            e.objectives.j2 = need(x, "j2").get<double>();
            e.objectives.penalty = e.objectives.j1 - e.objectives.xi;
            a.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("archive: ") + e.what());
    }
    return a;
}

ArchiveFile read_archive(const fs::path& path) { return archive_from_json(read_json(path)); }

json model_to_json(const EstimatedModel& m) {
    json terms = json::array();
    for (const auto& t : m.structure) terms.push_back(term_to_json(t));
    return {{"schema_version", kSchemaVersion},
            {"model_set", model_set_to_json(m.source)},
            {"terms", terms},
            {"coefficients", m.coefficients}};
}

EstimatedModel model_from_json(const json& j) {
    EstimatedModel m;
    if (j.contains("model_set")) m.source = model_set_from_json(j.at("model_set"));
    for (const auto& t : need(j, "terms")) m.structure.push_back(term_from_json(t));
    try {
        m.coefficients = need(j, "coefficients").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("coefficients: ") + e.what());
    }
    if (m.coefficients.size() != m.structure.size()) throw ParseError("model: terms and coefficients differ in length");
    return m;
}

EstimatedModel read_model(const fs::path& path) { return model_from_json(read_json(path)); }

json report_to_json(const TestReport& r) {
    json j = {{"schema_version", kSchemaVersion}, {"test", r.test},         {"statistic", r.statistic},
              {"p_value", r.p_value},             {"n", r.n},               {"degenerate", r.degenerate},
              {"mean_ranks", r.mean_ranks}};
    if (!r.compared.empty() || !r.z.empty()) {
        j["compared"] = r.compared;
        j["z"] = r.z;
        j["raw_p"] = r.raw_p;
        j["adjusted_p"] = r.adjusted_p;
    }
    j["reject"] = r.reject;
    return j;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_ranked_csv(const fs::path& path, const RankedFront& rf) {
    auto out = open_out(path);
    out << "rank,xi,nmse," << (rf.method == McdmMethod::mmd ? "mmd_d" : "mtd_r") << ",bits\n";
    for (std::size_t i = 0; i < rf.entries.size(); ++i) {
        const auto& e = rf.entries[i];
        out << i + 1 << ',' << e.objectives.xi << ',' << format_double(e.objectives.nmse) << ','
            << format_double(e.score) << ',' << e.genome.to_string() << '\n';
    }
}

void write_outcomes_csv(const fs::path& path, const OutcomeCounts& c) {
    auto out = open_out(path);
    out << "label,count\n";
    for (auto l : kOutcomeLabels) out << to_string(l) << ',' << c[l] << '\n';
    out << "total," << c.total << '\n';
}

void write_ic_csv(const fs::path& path, const std::vector<IcPoint>& ic) {
    auto out = open_out(path);
    out << "xi,bic,lilc\n";
    for (const auto& p : ic) out << p.xi << ',' << format_double(p.bic) << ',' << format_double(p.lilc) << '\n';
}

void write_frf_csv(const fs::path& path, const LinearFRF& frf) {
    auto out = open_out(path);
    out << "f_hz,re,im,mag_db\n";
    for (std::size_t i = 0; i < frf.response.size(); ++i)
        out << format_double(frf.frequencies[i]) << ',' << format_double(frf.response[i].real()) << ','
            << format_double(frf.response[i].imag()) << ',' << format_double(frf.magnitude_db(i)) << '\n';
}

std::vector<std::vector<double>> read_matrix_csv(const fs::path& path, std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (names.empty()) {
            names = cells;
            continue;
        }
        if (cells.size() != names.size()) throw ParseError("row has " + std::to_string(cells.size()) + " fields, expected " + std::to_string(names.size()), lineno);
        std::vector<double> row;
        for (auto& c : cells) {
            const auto b = c.find_first_not_of(' ');
            const auto e = c.find_last_not_of(' ');
            const std::string t = b == std::string::npos ? std::string{} : c.substr(b, e - b + 1);
            double v = 0.0;
            const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
                throw ParseError("not a number: '" + c + "'", lineno);
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (names.empty()) throw ParseError("empty CSV file " + path.string());
    if (header) *header = names;
    return rows;
}

}  // namespace narxmo
