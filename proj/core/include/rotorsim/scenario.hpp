#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rotorsim {

// A named table of numeric columns, e.g. population-vs-time traces.  Written
// as a CSV file next to the result document, or embedded in it for JSON
// output.
struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Caller-side overrides; anything unset falls back to the scenario document.
struct RunOptions {
  std::optional<unsigned long long> seed;
  std::optional<std::string> format;  // "csv" or "json"
  std::optional<int> threads;
  std::optional<std::filesystem::path> out_dir;
  bool write_files = true;
};

struct ScenarioOutcome {
  nlohmann::json document;          // full result document
  std::vector<ResultTable> tables;  // numeric tables, whatever the format
  std::vector<std::filesystem::path> files;  // everything written, document first
};

// Parse and check a scenario document without running it.  Throws ConfigError
// with a dotted key path on the first problem found; unknown keys are errors.
void validate_scenario(const nlohmann::json& doc);

// Run a scenario document end to end.  The result document embeds the fully
// resolved configuration (defaults materialized, overrides applied), so
// re-running the echoed scenario reproduces the run.
ScenarioOutcome run_scenario(const nlohmann::json& doc, const RunOptions& options = {});

// Load a scenario from a JSON file.  Parse failures throw ConfigError.
nlohmann::json load_scenario_file(const std::filesystem::path& path);

// Built-in scenario presets, embedded in the library.
struct PresetInfo {
  std::string name;
  std::string summary;
};

std::vector<PresetInfo> preset_catalog();

// Preset document by name; throws ConfigError if unknown.  Directories named
// by the ROTORSIM_PRESET_DIR environment variable are searched first, so a
// file <dir>/<name>.json can add to or shadow the built-in set.
nlohmann::json preset_scenario(const std::string& name);

// `target` is a path if a file by that name exists, otherwise a preset name.
nlohmann::json resolve_scenario(const std::string& target);

}  // namespace rotorsim
