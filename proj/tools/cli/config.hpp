#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mesospec/ensembles.hpp"
#include "mesospec/meso.hpp"

namespace mesospec::cli {

enum class Experiment { density, fluct, scaling, oracle_check, laws };
enum class OutputFormat { csv, json };

using KeyValues = std::map<std::string, std::string>;

/// A fully validated run. Keys of the flat config file mirror these fields.
struct RunConfig {
  Experiment experiment = Experiment::fluct;
  EnsembleSpec ensemble{};
  MesoGrid grid{};
  std::size_t M = 0;
  unsigned workers = 1;
  std::string output_dir;
  OutputFormat format = OutputFormat::csv;

  std::vector<std::size_t> n_list;  // scaling
  std::size_t points = 0;           // density and laws grid size
  double lambda_min = 0.0;          // density grid
  double lambda_max = 0.0;
  std::size_t trials = 0;           // oracle-check matrices
  std::size_t oracle_points = 0;    // oracle-check points per matrix
  bool check = false;               // exit 3 when a tolerance band fails

  /// Every key with its resolved value, for the manifest and reproduction.
  KeyValues resolved;
};

/// Documented configuration key.
struct KeyDoc {
  std::string key;
  std::string default_text;
  std::string help;
};

const std::vector<KeyDoc>& config_keys();

/// Parses flat `key = value` text. '#' starts a comment; blank lines are
/// ignored. Throws ValidationError on malformed lines or duplicate keys.
KeyValues parse_key_values(std::string_view text);

/// Builds and validates a RunConfig. Precedence: flags > file > environment
/// seed (MESOSPEC_SEED) > defaults. Unknown keys, malformed values and
/// out-of-range values throw ValidationError naming the field.
RunConfig parse_config(std::string_view file_contents, const KeyValues& flags,
                       std::optional<std::string> env_seed = std::nullopt);

/// Canonical `key = value` text that reproduces `config` through parse_config.
std::string to_config_text(const RunConfig& config);

const char* to_string(Experiment experiment) noexcept;
Experiment parse_experiment(const std::string& text);

}  // namespace mesospec::cli
