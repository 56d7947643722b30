#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "mesospec/errors.hpp"

using namespace mesospec;
using namespace mesospec::cli;

namespace {

RunConfig config_from(const KeyValues& flags, std::string_view file = "") {
  return parse_config(file, flags);
}

std::string field_of(const KeyValues& flags, std::string_view file = "") {
  try {
    parse_config(file, flags);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

const Table& table_named(const CommandResult& r, const std::string& name) {
  for (const auto& t : r.tables) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("no table " + name);
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mesospec_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_key_values") {
  const auto kv = parse_key_values("# comment\nN = 64\n\n  alpha=0.3  # trailing\nentry = rademacher\n");
  CHECK(kv.size() == 3);
  CHECK(kv.at("N") == "64");
  CHECK(kv.at("alpha") == "0.3");
  CHECK_THROWS_AS(parse_key_values("N 64"), ValidationError);
  CHECK_THROWS_AS(parse_key_values("N = 1\nN = 2"), ValidationError);
  CHECK_THROWS_AS(parse_key_values("= 2"), ValidationError);
}

TEST_CASE("flags-only fluct config gets documented defaults") {
  const auto cfg = config_from(
      {{"experiment", "fluct"}, {"N", "512"}, {"alpha", "0.25"}, {"c", "2"}, {"M", "2000"}});
  CHECK(cfg.experiment == Experiment::fluct);
  CHECK(cfg.ensemble.kind == EnsembleKind::sample_covariance);
  CHECK(cfg.ensemble.N == 512);
  CHECK(cfg.ensemble.m() == 1024);
  CHECK(cfg.grid.alpha == 0.25);
  CHECK(cfg.grid.lambda0 == 3.0);
  CHECK(cfg.grid.offsets == std::vector<double>{0, 1, 2, 4});
  CHECK(cfg.M == 2000);
  CHECK(cfg.format == OutputFormat::csv);
  CHECK(cfg.workers >= 1);
}

TEST_CASE("experiment-dependent defaults") {
  CHECK(config_from({{"experiment", "fluct"}, {"ensemble", "wigner"}}).grid.alpha == 0.1);
  CHECK(config_from({{"experiment", "fluct"}, {"ensemble", "wigner"}}).grid.lambda0 == 0.0);
  CHECK(config_from({{"experiment", "density"}}).grid.alpha == 0.5);
  CHECK(config_from({{"experiment", "oracle-check"}}).ensemble.N == 32);
  CHECK(config_from({{"experiment", "scaling"}}).n_list == std::vector<std::size_t>{256, 512, 1024});
  const auto d = config_from({{"experiment", "density"}, {"c", "2"}});
  const double width = 5.828427124746190 - 0.171572875253810;
  CHECK(d.lambda_min == doctest::Approx(0.171572875253810 + 0.1 * width));
  CHECK(d.lambda_max == doctest::Approx(5.828427124746190 - 0.1 * width));
}

TEST_CASE("validation names the offending field") {
  CHECK(field_of({{"experiment", "fluct"}, {"alpha", "1.0"}}) == "alpha");
  CHECK(field_of({{"experiment", "fluct"}, {"alpha", "0"}}) == "alpha");
  CHECK(field_of({{"experiment", "fluct"}, {"c", "0"}}) == "c");
  CHECK(field_of({{"experiment", "fluct"}, {"N", "abc"}}) == "N");
  CHECK(field_of({{"experiment", "fluct"}, {"N", "-3"}}) == "N");
  CHECK(field_of({{"experiment", "fluct"}, {"N", "0"}}) == "N");
  CHECK(field_of({{"experiment", "fluct"}, {"alpha", "0.2x"}}) == "alpha");
  CHECK(field_of({{"experiment", "fluct"}, {"colour", "red"}}) == "colour");
  CHECK(field_of({{"experiment", "fluct"}, {"M", "29"}}) == "M");
  CHECK(field_of({{"experiment", "fluct"}, {"M", "10"}, {"min_M", "10"}}) == "<accepted>");
  CHECK(field_of({{"experiment", "fluct"}, {"entry", "rademacher"}}) == "entry");
  CHECK(field_of({{"experiment", "fluct"}, {"ensemble", "gue"}}) == "ensemble");
  CHECK(field_of({{"experiment", "fluct"}, {"format", "xml"}}) == "format");
  CHECK(field_of({{"experiment", "fluct"}, {"check", "maybe"}}) == "check");
  CHECK(field_of({{"experiment", "fluct"}, {"offsets", "0,,2"}}) == "offsets");
  CHECK(field_of({{"experiment", "scaling"}, {"N_list", "256,256,512"}}) == "N_list");
  CHECK(field_of({{"experiment", "oracle-check"}, {"N", "129"}}) == "N");
  CHECK(field_of({{"experiment", "density"}, {"lambda_min", "0.2"}}) == "lambda_min");
  CHECK(field_of({{"experiment", "density"}, {"lambda_max", "5.7"}}) == "lambda_max");
  CHECK(field_of({{"experiment", "warp"}}) == "experiment");
  CHECK(field_of({}) == "experiment");
}

TEST_CASE("precedence: flags over file over environment seed over defaults") {
  const std::string file = "N = 64\nalpha = 0.3\nseed = 5\n";
  auto cfg = parse_config(file, {{"experiment", "density"}, {"N", "128"}}, std::string("99"));
  CHECK(cfg.ensemble.N == 128);
  CHECK(cfg.grid.alpha == 0.3);
  CHECK(cfg.ensemble.seed.master_seed == 5);
  cfg = parse_config("N = 64\n", {{"experiment", "density"}}, std::string("99"));
  CHECK(cfg.ensemble.seed.master_seed == 99);
  cfg = parse_config("N = 64\n", {{"experiment", "density"}});
  CHECK(cfg.ensemble.seed.master_seed == 20240607);
  CHECK(field_of({{"experiment", "density"}}, "N = 64\nN = 65\n") == "N");
}

TEST_CASE("canonical config text reproduces the config") {
  const auto cfg = config_from({{"experiment", "fluct"}, {"ensemble", "wigner"},
                                {"entry", "rademacher"}, {"offsets", "0,0.5,3"}, {"M", "40"}});
  const auto again = parse_config(to_config_text(cfg), {});
  CHECK(again.resolved == cfg.resolved);
  CHECK(again.grid.offsets == cfg.grid.offsets);
  CHECK(again.ensemble == cfg.ensemble);
}

TEST_CASE("format_number keeps 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(std::numbers::pi)) == std::numbers::pi);
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("cmd_fluct predicted entries follow the kernel") {
  auto cfg = config_from({{"experiment", "fluct"}, {"N", "32"}, {"M", "30"}, {"offsets", "0,2"},
                          {"workers", "2"}});
  const auto r = cmd_fluct(cfg);
  const auto& cov = table_named(r, "covariance");
  REQUIRE(cov.columns[6] == "predicted");
  CHECK(cov.rows.size() == 4);
  CHECK(cov.rows[1][6] == 0.0);  // (0, 2)
  CHECK(cov.rows[0][6] == 0.25);
  for (const auto& row : cov.rows) CHECK(row[5] > 0.0);
  CHECK(table_named(r, "gaussianity").rows.size() == 2);

  cfg = config_from({{"experiment", "fluct"}, {"N", "32"}, {"M", "30"}, {"offsets", "0"}});
  CHECK(table_named(cmd_fluct(cfg), "covariance").rows[0][6] == 0.25);
}

TEST_CASE("cmd_density columns and the semicircle center") {
  const auto cfg = config_from({{"experiment", "density"}, {"ensemble", "wigner"}, {"N", "64"},
                                {"M", "4"}, {"workers", "2"}});
  const auto r = cmd_density(cfg);
  const auto& t = table_named(r, "density");
  CHECK(t.columns == std::vector<std::string>{"lambda", "R_mean", "R_stderr", "analytic_pi_rho",
                                              "abs_error", "rel_error"});
  REQUIRE(t.rows.size() == 21);
  CHECK(t.rows[10][0] == 0.0);
  CHECK(t.rows[10][3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.rows.front()[0] == doctest::Approx(-1.6));
  CHECK(r.summary.contains("max_rel_error"));
}

TEST_CASE("cmd_scaling reports the reference slope") {
  for (const auto& [alpha, slope] : {std::pair{"0.5", -1.0}, std::pair{"0.25", -1.5}}) {
    const auto cfg = config_from({{"experiment", "scaling"}, {"ensemble", "wigner"},
                                  {"alpha", alpha}, {"N_list", "16,32,64"}, {"M", "20"}});
    const auto r = cmd_scaling(cfg);
    const auto& t = table_named(r, "scaling");
    CHECK(t.columns.back() == "reference_slope");
    CHECK(t.rows.size() == 3);
    for (const auto& row : t.rows) CHECK(row.back() == slope);
    CHECK(r.summary["reference_slope"].get<double>() == slope);
  }
}

TEST_CASE("cmd_oracle_check") {
  SUBCASE("N = 8, 10 trials") {
    const auto r = cmd_oracle_check(config_from({{"experiment", "oracle-check"}, {"N", "8"}}));
    CHECK(r.passed);
    CHECK(r.summary["max_abs_discrepancy"].get<double>() < 1e-9);
    CHECK(table_named(r, "oracle").rows.size() == 200);
  }
  SUBCASE("N = 64, budget scales with 1/eta") {
    const auto r = cmd_oracle_check(config_from(
        {{"experiment", "oracle-check"}, {"N", "64"}, {"ensemble", "wigner"}, {"trials", "2"}}));
    CHECK(r.passed);
    for (const auto& row : table_named(r, "oracle").rows) CHECK(row[5] <= row[6]);
  }
  SUBCASE("N = 1 matches the closed-form Cauchy value") {
    const auto cfg = config_from({{"experiment", "oracle-check"}, {"N", "1"}, {"trials", "3"}});
    const auto r = cmd_oracle_check(cfg);
    CHECK(r.passed);
    for (const auto& row : table_named(r, "oracle").rows) {
      auto spec = cfg.ensemble;
      spec.seed.stream_id = static_cast<std::uint64_t>(row[0]);
      const double a = generate(spec)(0, 0);
      const double lambda = row[1], eta = row[2];
      const double closed = eta / ((lambda - a) * (lambda - a) + eta * eta);
      CHECK(row[3] == doctest::Approx(closed).epsilon(1e-15));
      CHECK(std::abs(row[4] - closed) <= 1e-13 * closed);
    }
  }
}

TEST_CASE("cmd_laws tables") {
  const auto cfg = config_from({{"experiment", "laws"}, {"c", "1"}, {"scale", "1"}});
  const auto r = cmd_laws(cfg);
  const auto& dens = table_named(r, "law_density");
  REQUIRE(dens.rows.size() == 41);
  CHECK(dens.rows[20][0] == 2.0);
  CHECK(dens.rows[20][1] == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-15));

  const auto& kernel = table_named(r, "kernel");
  const double expected[] = {0.25, 0.12, 0.0, -5.0 / 169.0, -0.03};
  for (int d = 0; d < 5; ++d) CHECK(kernel.rows[d][1] == doctest::Approx(expected[d]).epsilon(1e-14));

  const auto& asym = table_named(r, "kernel_asymptote");
  bool found = false;
  for (const auto& row : asym.rows) {
    if (row[0] == 20.0) {
      found = true;
      CHECK(row[2] == doctest::Approx(0.0295).epsilon(0.01));
    }
  }
  CHECK(found);
}

TEST_CASE("reruns produce byte-identical tables and one manifest") {
  const auto dir_a = fresh_dir("rerun_a");
  const auto dir_b = fresh_dir("rerun_b");
  auto flags = KeyValues{{"experiment", "fluct"}, {"ensemble", "wigner"}, {"N", "24"},
                         {"M", "32"}, {"alpha", "0.4"}, {"workers", "1"}};
  flags["output_dir"] = dir_a.string();
  const auto cfg_a = config_from(flags);
  flags["output_dir"] = dir_b.string();
  flags["workers"] = "3";
  const auto cfg_b = config_from(flags);

  const RunTimes times{"2026-01-01T00:00:00Z", "2026-01-01T00:00:01Z"};
  const auto files_a = write_outputs(cfg_a, run_command(cfg_a), times);
  const auto files_b = write_outputs(cfg_b, run_command(cfg_b), times);
  CHECK(files_a == files_b);
  for (const auto& f : files_a) {
    if (f.ends_with(".csv")) CHECK(slurp(dir_a / f) == slurp(dir_b / f));
  }
  std::size_t manifests = 0, temporaries = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
    manifests += entry.path().filename() == "manifest.json";
    temporaries += entry.path().extension() == ".tmp";
  }
  CHECK(manifests == 1);
  CHECK(temporaries == 0);

  const auto manifest = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
  CHECK(manifest["master_seed"].get<std::uint64_t>() == 20240607);
  CHECK(manifest["config"]["N"] == "24");
  CHECK(manifest.contains("phase_seconds"));
  CHECK(manifest["artifact_version"] == MESOSPEC_VERSION_STRING);

  // The manifest's config echo reproduces the run.
  KeyValues echo;
  for (const auto& [k, v] : manifest["config"].items()) echo[k] = v.get<std::string>();
  echo["output_dir"] = fresh_dir("rerun_c").string();
  const auto cfg_c = parse_config("", echo);
  const auto files_c = write_outputs(cfg_c, run_command(cfg_c), times);
  for (const auto& f : files_c) {
    if (f.ends_with(".csv")) CHECK(slurp(std::filesystem::path(cfg_c.output_dir) / f) == slurp(dir_a / f));
  }
}

TEST_CASE("json tables and the sample-covariance manifest") {
  const auto dir = fresh_dir("json");
  const auto cfg = config_from({{"experiment", "laws"}, {"format", "json"}, {"c", "0.25"},
                                {"N", "10"}, {"output_dir", dir.string()}});
  const auto files = write_outputs(cfg, run_command(cfg), {"a", "b"});
  CHECK(std::find(files.begin(), files.end(), "kernel.json") != files.end());
  const auto kernel = nlohmann::json::parse(slurp(dir / "kernel.json"));
  CHECK(kernel["rows"][0][1].get<double>() == 0.25);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["realized_m_over_N"].get<double>() == doctest::Approx(0.3));
}

#ifdef MESOSPEC_TOOL_PATH
namespace {
int run_tool(const std::string& args) {
  const std::string cmd = std::string(MESOSPEC_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST_CASE("command-line exit codes") {
  const auto dir = fresh_dir("tool");
  const std::string out = " --output_dir " + dir.string();
  CHECK(run_tool("laws --c 1" + out) == 0);
  CHECK(std::filesystem::exists(dir / "law_density.csv"));
  CHECK(run_tool("fluct --alpha 1.0" + out) == 1);
  CHECK(run_tool("fluct --bogus 3" + out) != 0);
  CHECK(run_tool("oracle-check --N 8 --trials 2" + out) == 0);
  // A tiny density run misses the 5% band; with check = true that is exit 3.
  CHECK(run_tool("density --ensemble wigner --N 8 --M 1 --check true" + out) == 3);
  CHECK(run_tool("density --ensemble wigner --N 8 --M 1" + out) == 0);

  const auto cfg_file = dir / "run.cfg";
  std::filesystem::create_directories(dir);
  std::ofstream(cfg_file) << "ensemble = wigner\nN = 8\nM = 2\nalpha = 0.7\n";
  CHECK(run_tool("density --config " + cfg_file.string() + out) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["config"]["alpha"] == "0.69999999999999996");
}
#endif
