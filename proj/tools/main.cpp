#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "mesospec/errors.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Subcommand {
  const char* name;
  const char* description;
};

constexpr Subcommand kSubcommands[] = {
    {"density", "mean smoothed density against the limiting law on a bulk grid"},
    {"fluct", "covariance and Gaussianity of the scaled fluctuations"},
    {"scaling", "log-log slope of Var[R] against N"},
    {"oracle-check", "smoothed density against a direct resolvent computation"},
    {"laws", "tables of the analytic densities and covariance kernel"},
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mesospec::ValidationError("cannot read '" + path + "'", "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mesospec;

  CLI::App app{"mesospec: mesoscopic eigenvalue statistics of random matrices"};
  app.set_version_flag("--version", std::string(MESOSPEC_VERSION_STRING));
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::App*> subs;

  for (const auto& sc : kSubcommands) {
    auto* sub = app.add_subcommand(sc.name, sc.description);
    sub->add_option("--config", config_path, "flat key = value configuration file");
    for (const auto& key : cli::config_keys()) {
      if (key.key == "experiment") continue;
      sub->add_option("--" + key.key, raw[std::string(sc.name) + "/" + key.key],
                      key.help + " [default: " + key.default_text + "]");
    }
    subs[sc.name] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::string chosen;
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) chosen = name;
    }
    cli::KeyValues flags{{"experiment", chosen}};
    for (const auto& key : cli::config_keys()) {
      if (key.key == "experiment") continue;
      if (subs[chosen]->count("--" + key.key) > 0) flags[key.key] = raw[chosen + "/" + key.key];
    }

    const std::string file = config_path.empty() ? std::string{} : read_file(config_path);
    std::optional<std::string> env_seed;
    if (const char* env = std::getenv("MESOSPEC_SEED")) env_seed = env;
    const auto config = cli::parse_config(file, flags, env_seed);

    cli::RunTimes times;
    times.start_utc = cli::utc_timestamp();
    const auto result = cli::run_command(config);
    times.end_utc = cli::utc_timestamp();
    const auto files = cli::write_outputs(config, result, times);

    std::cout << result.summary.dump(2) << "\n";
    std::cerr << "wrote " << files.size() << " files to " << config.output_dir << "\n";
    if (!result.passed) {
      if (result.failure_exit_code == kExitNumerical) return kExitNumerical;
      if (config.check) return result.failure_exit_code;
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
