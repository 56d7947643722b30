#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"

namespace mesospec::cli {

/// A named numeric table; one file per table in the output directory.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CommandResult {
  std::vector<Table> tables;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  bool passed = true;
  /// Exit status to use when !passed: 3 for a tolerance band, 2 for a
  /// numerical breach.
  int failure_exit_code = 3;
  std::vector<std::pair<std::string, double>> phase_seconds;
};

/// Fixed 17 significant digits, round-trip exact for doubles.
std::string format_number(double value);

std::string to_csv(const Table& table);
nlohmann::ordered_json to_json(const Table& table);

struct RunTimes {
  std::string start_utc;
  std::string end_utc;
};

std::string utc_timestamp();

/// Manifest contents: config echo, seed, realized m/N, timestamps, per-phase
/// wall clock and the artifact version.
nlohmann::ordered_json make_manifest(const RunConfig& config, const CommandResult& result,
                                     const RunTimes& times,
                                     const std::vector<std::string>& files);

/// Writes every table, summary.json and manifest.json under
/// config.output_dir. Each file goes to a temporary name first and is renamed
/// into place, so readers never see partial files. Returns the file names.
std::vector<std::string> write_outputs(const RunConfig& config, const CommandResult& result,
                                       const RunTimes& times);

/// Writes `contents` to `path` via a sibling temporary and rename.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace mesospec::cli
