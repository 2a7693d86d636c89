#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "splitkd/simulator.hpp"

namespace splitkd {

/// Parses and fully validates a scenario file (JSON, strict schema: unknown
/// keys are rejected at every level, defaults are applied so the returned
/// value is fully explicit). cqi_table_path entries resolve relative to the
/// scenario file's directory.
Scenario load_scenario(const std::string& path);

/// Same, from an already parsed document. base_dir resolves relative paths.
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");

/// Normalized form: every field explicit (models as per-layer tables, CQI
/// table inline, frequency levels as a list). Loading the result reproduces
/// the identical Scenario.
nlohmann::json scenario_to_json(const Scenario& scenario);

std::string serialize_scenario(const Scenario& scenario);

struct CatalogEntry {
    std::string teacher;
    double teacher_size_gb = 0.0;
    std::string distillation_type;
    std::string student;
    double student_size_gb = 0.0;
    double compression_rate = 0.0;
    std::string performance_note;
};

/// Reads the distillation catalog CSV. Every row must satisfy
/// teacher_size / student_size == compression_rate within 5% (the stated
/// rates are rounded integers).
std::vector<CatalogEntry> load_catalog(const std::string& path);

std::string format_catalog(const std::vector<CatalogEntry>& entries);

/// One CSV row per device-round across all trials, stable column order,
/// 9-significant-digit numerics; cost fields are left empty (not zero) for
/// rounds that could not run.
std::string emit_rows(const std::vector<TrialReport>& trials);

/// Human-readable per-regime, per-method means and the reduction figures,
/// with the normalized configuration echoed in the header.
std::string emit_summary(const ComparisonTable& table, const Scenario& scenario);

/// Write-temp-then-rename; never leaves a partial file at path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace splitkd
