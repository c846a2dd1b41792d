#pragma once

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "decaywatch/chain.hpp"
#include "decaywatch/ensemble.hpp"
#include "decaywatch/format.hpp"
#include "decaywatch/master_equation.hpp"

namespace decaywatch {

enum class OutputFormat { Csv, Json, Both };

inline std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    default: return "both";
  }
}

inline OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw std::invalid_argument("unknown format \"" + s + "\" (expected csv, json or both)");
}

// One reproducible run: the chain source (either an n-atom source or
// explicit rates), the query, and the seed.  Everything a manifest needs to
// replay the run byte for byte.
struct RunConfig {
  std::optional<int> n_atoms;
  std::optional<double> decay_constant;
  std::optional<std::vector<double>> rates;

  double query_time = 1.0;
  std::int64_t trials = 100000;
  std::uint64_t master_seed = 42;
  std::string output_dir = "decaywatch_out";
  OutputFormat format = OutputFormat::Both;
  int threads = 0;                 // 0: use available parallelism
  std::vector<double> time_grid;   // analytic only; resolved before writing

  void validate() const {
    const bool atom_source = n_atoms.has_value() || decay_constant.has_value();
    if (rates.has_value() == atom_source) {
      throw std::invalid_argument(
          "config: exactly one chain source required (either --atoms with --k, or --rates)");
    }
    if (!rates && !(n_atoms && decay_constant)) {
      throw std::invalid_argument("config: an n-atom source needs both --atoms and --k");
    }
    if (trials < 1) {
      throw std::invalid_argument("config: trials must be at least 1");
    }
    if (!(query_time >= 0.0)) {
      throw std::invalid_argument("config: time must be nonnegative");
    }
    if (threads < 0) {
      throw std::invalid_argument("config: threads must be nonnegative");
    }
  }

  ChainSpec make_chain() const {
    validate();
    if (rates) return ChainSpec(*rates);
    return make_n_atom_chain(*decay_constant, *n_atoms);
  }
};

inline nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  if (cfg.n_atoms) j["atoms"] = *cfg.n_atoms;
  if (cfg.decay_constant) j["k"] = *cfg.decay_constant;
  if (cfg.rates) j["rates"] = *cfg.rates;
  j["time"] = cfg.query_time;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.master_seed;
  j["out"] = cfg.output_dir;
  j["format"] = to_string(cfg.format);
  j["threads"] = cfg.threads;
  if (!cfg.time_grid.empty()) j["grid"] = cfg.time_grid;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("atoms")) cfg.n_atoms = j["atoms"].get<int>();
  if (j.contains("k")) cfg.decay_constant = j["k"].get<double>();
  if (j.contains("rates")) cfg.rates = j["rates"].get<std::vector<double>>();
  if (j.contains("time")) cfg.query_time = j["time"].get<double>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<std::int64_t>();
  if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) cfg.output_dir = j["out"].get<std::string>();
  if (j.contains("format")) cfg.format = output_format_from_string(j["format"].get<std::string>());
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("grid")) cfg.time_grid = j["grid"].get<std::vector<double>>();
  return cfg;
}

// Creates the directory if needed and proves it is writable.
inline void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path probe = dir / ".write_probe";
  {
    std::ofstream f(probe, std::ios::binary);
    if (!f) {
      throw std::runtime_error("output directory not writable: " + dir.string());
    }
  }
  std::filesystem::remove(probe, ec);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);  // binary: LF endings, byte-stable
  if (!f) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  f << content;
  if (!f) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

// --- manifests ------------------------------------------------------------

// The manifest is the only artifact carrying a timestamp; data files are
// pure functions of the config so reruns stay byte-identical.
inline nlohmann::ordered_json make_manifest(const std::string& command, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = command;
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created_utc"] = stamp;
  j["config"] = to_json(cfg);
  return j;
}

inline std::pair<std::string, RunConfig> load_manifest(const std::filesystem::path& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  if (!j.contains("command") || !j.contains("config")) {
    throw std::invalid_argument("manifest missing \"command\" or \"config\": " + path.string());
  }
  return {j["command"].get<std::string>(), config_from_json(j["config"])};
}

// --- CSV emission ----------------------------------------------------------

// analytic.csv: t, the component weights, then the net currents.
inline std::string analytic_csv(const ChainSpec& chain, const std::vector<double>& grid) {
  const std::size_t n = chain.num_components();
  std::string out = "t";
  for (std::size_t i = 0; i < n; ++i) out += ",P" + std::to_string(i);
  for (std::size_t i = 0; i < n; ++i) out += ",J" + std::to_string(i);
  out += '\n';
  for (double t : grid) {
    const ComponentDistribution dist = born_distribution(chain, t);
    const CurrentVector cv = currents(chain, dist);
    out += format_real(t);
    for (double p : dist.probs) out += "," + format_real(p);
    for (double j : cv.net) out += "," + format_real(j);
    out += '\n';
  }
  return out;
}

inline std::string histogram_csv(const EnsembleResult& result,
                                 const std::vector<double>& expected_probs) {
  std::string out = "count,occurrences,frequency,expected\n";
  const std::vector<double> freq = result.frequencies();
  for (std::size_t i = 0; i < result.count_histogram.size(); ++i) {
    out += std::to_string(i);
    out += ',' + std::to_string(result.count_histogram[i]);
    out += ',' + format_real(freq[i]);
    out += ',' + format_real(expected_probs[i]);
    out += '\n';
  }
  return out;
}

// --- verification verdicts --------------------------------------------------

struct VerifyThresholds {
  double count_p_min = 1e-3;       // one-sample chi-square vs the analytic law
  double two_sample_p_min = 1e-2;  // cycle ensemble vs direct jump oracle
  std::size_t ks_min_samples = 100;
};

struct VerifyCheck {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyOutcome {
  std::vector<VerifyCheck> checks;

  bool all_passed() const {
    for (const VerifyCheck& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }

  std::string first_failure() const {
    for (const VerifyCheck& c : checks) {
      if (!c.passed) return c.name;
    }
    return {};
  }
};

// Pure verdict logic so the pass/fail mapping is testable without running
// the CLI: count distribution vs the analytic law, cycle ensemble vs the
// jump oracle, and each cycle's waiting times vs its exponential.
inline VerifyOutcome evaluate_verification(const ComparisonReport& report,
                                           const ChiSquareResult& two_sample,
                                           const EnsembleResult& ensemble,
                                           const VerifyThresholds& thresholds = {}) {
  VerifyOutcome out;
  out.checks.push_back({"count-distribution-chi-square-p", report.p_value,
                        thresholds.count_p_min, report.p_value >= thresholds.count_p_min});
  out.checks.push_back({"cycle-vs-jump-two-sample-p", two_sample.p_value,
                        thresholds.two_sample_p_min,
                        two_sample.p_value >= thresholds.two_sample_p_min});
  for (std::size_t c = 0; c < report.per_cycle_ks.size(); ++c) {
    const std::size_t n = ensemble.cycle_waiting_samples[c].size();
    if (!report.per_cycle_ks[c] || n < thresholds.ks_min_samples) continue;
    const double crit = ks_critical_1pct(n);
    out.checks.push_back({"cycle-" + std::to_string(c + 1) + "-waiting-time-ks",
                          *report.per_cycle_ks[c], crit, *report.per_cycle_ks[c] <= crit});
  }
  return out;
}

inline nlohmann::ordered_json to_json(const VerifyOutcome& outcome) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const VerifyCheck& c : outcome.checks) {
    arr.push_back({{"name", c.name},
                   {"statistic", c.statistic},
                   {"threshold", c.threshold},
                   {"passed", c.passed}});
  }
  return arr;
}

}  // namespace decaywatch
