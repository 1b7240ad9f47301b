#pragma once

#include "narxmo/evo_core.hpp"
#include "narxmo/frf.hpp"
#include "narxmo/mcdm.hpp"
#include "narxmo/outcomes.hpp"
#include "narxmo/stats.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace narxmo {

inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

json model_set_to_json(const ModelSetSpec& s);
ModelSetSpec model_set_from_json(const json& j);

json term_to_json(const Term& t);
Term term_from_json(const json& j);

json archive_to_json(const std::vector<ArchiveEntry>& entries, const ModelSetSpec& spec);

struct ArchiveFile {
    ModelSetSpec spec;
    std::vector<ArchiveEntry> entries;
};
ArchiveFile archive_from_json(const json& j);
ArchiveFile read_archive(const std::filesystem::path& path);

json model_to_json(const EstimatedModel& m);
EstimatedModel model_from_json(const json& j);
EstimatedModel read_model(const std::filesystem::path& path);

json report_to_json(const TestReport& r);

json read_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

void write_ranked_csv(const std::filesystem::path& path, const RankedFront& rf);
void write_outcomes_csv(const std::filesystem::path& path, const OutcomeCounts& c);
void write_ic_csv(const std::filesystem::path& path, const std::vector<IcPoint>& ic);
void write_frf_csv(const std::filesystem::path& path, const LinearFRF& frf);

// Numeric CSV with a header row. Returns the rows; `header` receives the
// column names.
std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* header);

}  // namespace narxmo
