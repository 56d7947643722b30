#include "cli/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace mesospec::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const Table& table) {
  nlohmann::ordered_json j;
  j["name"] = table.name;
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (double v : row) {
      if (std::isfinite(v)) {
        r.push_back(v);
      } else {
        r.push_back(format_number(v));
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json make_manifest(const RunConfig& config, const CommandResult& result,
                                     const RunTimes& times,
                                     const std::vector<std::string>& files) {
  nlohmann::ordered_json m;
  m["artifact_version"] = MESOSPEC_VERSION_STRING;
  m["experiment"] = to_string(config.experiment);
  m["config"] = config.resolved;
  m["master_seed"] = config.ensemble.seed.master_seed;
  if (config.ensemble.kind == EnsembleKind::sample_covariance) {
    m["m"] = config.ensemble.m();
    m["realized_m_over_N"] = config.ensemble.realized_ratio();
  } else {
    m["m"] = nullptr;
    m["realized_m_over_N"] = nullptr;
  }
  m["start_time"] = times.start_utc;
  m["end_time"] = times.end_utc;
  auto phases = nlohmann::ordered_json::object();
  for (const auto& [name, seconds] : result.phase_seconds) phases[name] = seconds;
  m["phase_seconds"] = std::move(phases);
  m["passed"] = result.passed;
  m["files"] = files;
  return m;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> write_outputs(const RunConfig& config, const CommandResult& result,
                                       const RunTimes& times) {
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);

  std::vector<std::string> files;
  for (const auto& table : result.tables) {
    if (config.format == OutputFormat::csv) {
      files.push_back(table.name + ".csv");
      write_atomically(dir / files.back(), to_csv(table));
    } else {
      files.push_back(table.name + ".json");
      write_atomically(dir / files.back(), to_json(table).dump(2) + "\n");
    }
  }
  files.push_back("summary.json");
  write_atomically(dir / files.back(), result.summary.dump(2) + "\n");
  write_atomically(dir / "manifest.json",
                   make_manifest(config, result, times, files).dump(2) + "\n");
  files.push_back("manifest.json");
  return files;
}

}  // namespace mesospec::cli
