#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "mesospec/errors.hpp"
#include "mesospec/laws.hpp"

namespace mesospec::cli {

namespace {

constexpr double kDensityEdgeMargin = 0.1;
constexpr std::uint64_t kDefaultSeed = 20240607;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value)) {
    throw ValidationError("expected a real number, got '" + text + "'", key);
  }
  return value;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ValidationError("expected a non-negative integer, got '" + text + "'", key);
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError("expected true|false, got '" + text + "'", key);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(std::string_view(text).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

class Resolver {
 public:
  explicit Resolver(KeyValues values) : values_(std::move(values)) {}

  std::string text(const std::string& key, const std::string& fallback) {
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
  }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double real(const std::string& key, double fallback) {
    const auto it = values_.find(key);
    const double v = it == values_.end() ? fallback : to_double(key, it->second);
    resolved_[key] = format_double(v);
    return v;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    const auto it = values_.find(key);
    const std::uint64_t v = it == values_.end() ? fallback : to_unsigned(key, it->second);
    resolved_[key] = std::to_string(v);
    return v;
  }
  bool boolean(const std::string& key, bool fallback) {
    const auto it = values_.find(key);
    const bool v = it == values_.end() ? fallback : to_bool(key, it->second);
    resolved_[key] = v ? "true" : "false";
    return v;
  }
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) {
    const auto it = values_.find(key);
    std::vector<double> v = fallback;
    if (it != values_.end()) {
      v.clear();
      for (const auto& piece : split_list(it->second)) v.push_back(to_double(key, piece));
    }
    resolved_[key] = join(v);
    return v;
  }
  std::vector<std::size_t> sizes(const std::string& key, const std::vector<std::size_t>& fallback) {
    const auto it = values_.find(key);
    std::vector<std::size_t> v = fallback;
    if (it != values_.end()) {
      v.clear();
      for (const auto& piece : split_list(it->second)) v.push_back(to_unsigned(key, piece));
    }
    resolved_[key] = join(v);
    return v;
  }

  KeyValues take_resolved() { return std::move(resolved_); }

 private:
  KeyValues values_;
  KeyValues resolved_;
};

void rethrow_with_field(const ValidationError& e, const std::string& field) {
  if (!e.field().empty()) throw e;
  throw ValidationError(e.what(), field);
}

}  // namespace

const std::vector<KeyDoc>& config_keys() {
  static const std::vector<KeyDoc> keys = {
      {"experiment", "(subcommand)", "density | fluct | scaling | oracle-check | laws"},
      {"ensemble", "sample_covariance", "wigner | sample_covariance"},
      {"N", "512 (32 for oracle-check)", "matrix dimension"},
      {"entry", "gaussian", "entry law: gaussian | rademacher | uniform"},
      {"scale", "1", "entry standard deviation (v for wigner, u for sample_covariance)"},
      {"c", "2", "sample_covariance ratio; m = round(c N)"},
      {"seed", "20240607", "master seed (MESOSPEC_SEED overrides the default)"},
      {"alpha", "0.5; fluct: 0.25 sample_covariance, 0.1 wigner", "resolution exponent in (0,1)"},
      {"lambda", "bulk center of the limiting law", "base energy for fluct/scaling"},
      {"offsets", "0,1,2,4 for fluct, else 0", "tau offsets, points lambda + tau N^-alpha"},
      {"M", "density 20, fluct 4000, scaling 500", "realizations"},
      {"min_M", "30", "smallest M accepted by fluct"},
      {"workers", "hardware concurrency", "worker threads; results do not depend on it"},
      {"output_dir", "mesospec-out", "directory for tables and the manifest"},
      {"format", "csv", "table format: csv | json"},
      {"N_list", "256,512,1024", "matrix sizes for scaling (at least 3 distinct)"},
      {"points", "density 21, laws 41", "grid size for density and laws"},
      {"lambda_min", "lower edge + 10% of support width", "density grid start"},
      {"lambda_max", "upper edge - 10% of support width", "density grid end"},
      {"trials", "10", "random matrices for oracle-check"},
      {"oracle_points", "20", "random bulk points per oracle-check matrix"},
      {"check", "false", "exit with status 3 when a tolerance band fails"},
  };
  return keys;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto newline = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, newline == std::string_view::npos ? std::string_view::npos : newline - pos);
    ++line_no;
    pos = newline == std::string_view::npos ? text.size() + 1 : newline + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected key = value", "config");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": empty key", "config");
    }
    if (!out.emplace(key, value).second) {
      throw ValidationError("duplicate key on line " + std::to_string(line_no), key);
    }
  }
  return out;
}

RunConfig parse_config(std::string_view file_contents, const KeyValues& flags,
                       std::optional<std::string> env_seed) {
  KeyValues merged = parse_key_values(file_contents);
  for (const auto& [k, v] : flags) merged[k] = v;
  if (!merged.count("seed") && env_seed && !env_seed->empty()) merged["seed"] = *env_seed;

  std::set<std::string> known;
  for (const auto& doc : config_keys()) known.insert(doc.key);
  for (const auto& [k, v] : merged) {
    if (!known.count(k)) throw ValidationError("unknown configuration key", k);
  }
  if (!merged.count("experiment")) throw ValidationError("required", "experiment");

  Resolver r(std::move(merged));
  RunConfig cfg;
  cfg.experiment = parse_experiment(r.text("experiment", ""));
  const Experiment ex = cfg.experiment;

  auto& e = cfg.ensemble;
  e.kind = parse_ensemble_kind(r.text("ensemble", "sample_covariance"));
  e.N = r.integer("N", ex == Experiment::oracle_check ? 32 : 512);
  e.entry.kind = parse_entry_kind(r.text("entry", "gaussian"));
  e.entry.scale = r.real("scale", 1.0);
  e.c = r.real("c", 2.0);
  e.seed = {r.integer("seed", kDefaultSeed), 0};
  try {
    validate(e);
  } catch (const ValidationError& err) {
    rethrow_with_field(err, "ensemble");
  }
  const auto law = LimitingLaw::of(e);

  double default_alpha = 0.5;
  if (ex == Experiment::fluct) default_alpha = e.kind == EnsembleKind::wigner ? 0.1 : 0.25;
  cfg.grid.alpha = r.real("alpha", default_alpha);
  cfg.grid.lambda0 = r.real("lambda", bulk_center(law));
  cfg.grid.offsets =
      r.reals("offsets", ex == Experiment::fluct ? std::vector<double>{0, 1, 2, 4} : std::vector<double>{0});
  cfg.grid.N = e.N;
  try {
    validate(cfg.grid);
  } catch (const ValidationError& err) {
    rethrow_with_field(err, "grid");
  }

  std::uint64_t default_m = 20;
  if (ex == Experiment::fluct) default_m = 4000;
  if (ex == Experiment::scaling) default_m = 500;
  cfg.M = r.integer("M", default_m);
  if (cfg.M < 1) throw ValidationError("must be at least 1", "M");
  const std::size_t min_m = r.integer("min_M", kDefaultMinRealizations);
  if (ex == Experiment::fluct && cfg.M < std::max<std::size_t>(min_m, 2)) {
    throw ValidationError("fluct needs at least " + std::to_string(min_m) + " realizations", "M");
  }
  if (ex == Experiment::scaling && cfg.M < 2) throw ValidationError("must be at least 2", "M");

  cfg.workers = static_cast<unsigned>(r.integer("workers", resolve_workers(0)));
  if (cfg.workers < 1) throw ValidationError("must be at least 1", "workers");
  cfg.output_dir = r.text("output_dir", "mesospec-out");
  if (cfg.output_dir.empty()) throw ValidationError("must not be empty", "output_dir");
  const std::string format = r.text("format", "csv");
  if (format == "csv") {
    cfg.format = OutputFormat::csv;
  } else if (format == "json") {
    cfg.format = OutputFormat::json;
  } else {
    throw ValidationError("expected csv|json, got '" + format + "'", "format");
  }

  cfg.n_list = r.sizes("N_list", {256, 512, 1024});
  if (ex == Experiment::scaling) {
    auto distinct = cfg.n_list;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw ValidationError("need at least three distinct sizes", "N_list");
    if (distinct.front() == 0) throw ValidationError("sizes must be positive", "N_list");
  }

  cfg.points = r.integer("points", ex == Experiment::laws ? 41 : 21);
  if (cfg.points < 1) throw ValidationError("must be at least 1", "points");
  const auto support = support_and_mass(law);
  const double margin = kDensityEdgeMargin * (support.upper - support.lower);
  const double inner_lo = support.lower + margin;
  const double inner_hi = support.upper - margin;
  cfg.lambda_min = r.real("lambda_min", inner_lo);
  cfg.lambda_max = r.real("lambda_max", inner_hi);
  if (ex == Experiment::density) {
    const double slack = 1e-12 * (support.upper - support.lower);
    if (cfg.lambda_min < inner_lo - slack || cfg.lambda_min > inner_hi + slack) {
      throw ValidationError("outside the bulk [" + format_double(inner_lo) + ", " +
                                format_double(inner_hi) + "] (10% edge margin)",
                            "lambda_min");
    }
    if (cfg.lambda_max < inner_lo - slack || cfg.lambda_max > inner_hi + slack) {
      throw ValidationError("outside the bulk [" + format_double(inner_lo) + ", " +
                                format_double(inner_hi) + "] (10% edge margin)",
                            "lambda_max");
    }
    if (cfg.lambda_max < cfg.lambda_min) {
      throw ValidationError("must not be below lambda_min", "lambda_max");
    }
  }

  cfg.trials = r.integer("trials", 10);
  cfg.oracle_points = r.integer("oracle_points", 20);
  if (ex == Experiment::oracle_check) {
    if (e.N > kDefaultOracleCap) {
      throw ValidationError("oracle-check needs N <= " + std::to_string(kDefaultOracleCap), "N");
    }
    if (cfg.trials < 1) throw ValidationError("must be at least 1", "trials");
    if (cfg.oracle_points < 1) throw ValidationError("must be at least 1", "oracle_points");
  }
  cfg.check = r.boolean("check", false);

  cfg.resolved = r.take_resolved();
  cfg.resolved["min_M"] = std::to_string(min_m);
  return cfg;
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.resolved) out += k + " = " + v + "\n";
  return out;
}

const char* to_string(Experiment experiment) noexcept {
  switch (experiment) {
    case Experiment::density: return "density";
    case Experiment::fluct: return "fluct";
    case Experiment::scaling: return "scaling";
    case Experiment::oracle_check: return "oracle-check";
    case Experiment::laws: return "laws";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& text) {
  for (auto e : {Experiment::density, Experiment::fluct, Experiment::scaling,
                 Experiment::oracle_check, Experiment::laws}) {
    if (text == to_string(e)) return e;
  }
  throw ValidationError("expected density|fluct|scaling|oracle-check|laws, got '" + text + "'",
                        "experiment");
}

}  // namespace mesospec::cli
