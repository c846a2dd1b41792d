// Command-line front end: every subcommand is a pure function of its config
// and seed, emitting plot-ready CSV/JSON plus a manifest for exact replay.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "decaywatch/decaywatch.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatisticalFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInsufficientData = 3;

struct RawFlags {
  std::optional<int> atoms;
  std::optional<double> k;
  std::optional<std::vector<double>> rates;
  std::optional<double> time;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  std::optional<std::string> config_path;
  std::optional<std::string> manifest_path;
  std::optional<std::vector<double>> grid;
  std::optional<int> points;
};

void add_common_flags(CLI::App* cmd, RawFlags& f) {
  cmd->add_option("--atoms", f.atoms, "number of identical atoms in the source");
  cmd->add_option("--k", f.k, "per-atom decay constant");
  cmd->add_option("--rates", f.rates, "explicit per-transition rates")->delimiter(',');
  cmd->add_option("--time", f.time, "query time t");
  cmd->add_option("--trials", f.trials, "ensemble size");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "output format: csv, json or both");
  cmd->add_option("--threads", f.threads, "worker threads (0 = available parallelism)");
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--manifest", f.manifest_path,
                  "replay a prior run from its manifest (config flags are ignored; "
                  "--out and --threads still apply)");
}

void apply_flag_overrides(decaywatch::RunConfig& cfg, const RawFlags& f, bool config_only) {
  if (!config_only) {
    if (f.atoms) {
      cfg.n_atoms = f.atoms;
      cfg.rates.reset();
    }
    if (f.k) {
      cfg.decay_constant = f.k;
      cfg.rates.reset();
    }
    if (f.rates) {
      cfg.rates = f.rates;
      cfg.n_atoms.reset();
      cfg.decay_constant.reset();
    }
    if (f.time) cfg.query_time = *f.time;
    if (f.trials) cfg.trials = *f.trials;
    if (f.seed) cfg.master_seed = *f.seed;
    if (f.format) cfg.format = decaywatch::output_format_from_string(*f.format);
    if (f.grid) cfg.time_grid = *f.grid;
  }
  if (f.out) cfg.output_dir = *f.out;
  if (f.threads) cfg.threads = *f.threads;
}

// Resolution order: built-in defaults, then --config file, then flags.
// With --manifest the stored config wins and only --out/--threads apply.
decaywatch::RunConfig resolve_config(const RawFlags& f, const std::string& command) {
  decaywatch::RunConfig cfg;
  if (f.manifest_path) {
    auto [stored_command, stored] = decaywatch::load_manifest(*f.manifest_path);
    if (stored_command != command) {
      throw std::invalid_argument("manifest was recorded by \"" + stored_command +
                                  "\", not \"" + command + "\"");
    }
    cfg = stored;
    apply_flag_overrides(cfg, f, /*config_only=*/true);
  } else {
    if (f.config_path) {
      cfg = decaywatch::config_from_json(
          nlohmann::json::parse(decaywatch::read_text_file(*f.config_path)));
    } else if (!f.rates && !f.atoms && !f.k) {
      cfg.n_atoms = 2;  // default source: two atoms at unit decay constant
      cfg.decay_constant = 1.0;
    }
    apply_flag_overrides(cfg, f, /*config_only=*/false);
  }
  cfg.validate();
  return cfg;
}

std::vector<double> resolve_grid(const decaywatch::RunConfig& cfg, int points) {
  std::vector<double> grid = cfg.time_grid;
  if (grid.empty()) {
    if (points < 1) throw std::invalid_argument("--points must be at least 1");
    grid.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      grid[static_cast<std::size_t>(i)] =
          points == 1 ? cfg.query_time
                      : cfg.query_time * static_cast<double>(i) / static_cast<double>(points - 1);
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw std::invalid_argument("grid values must be nonnegative");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("grid values must be strictly increasing");
    }
  }
  return grid;
}

int cmd_analytic(const RawFlags& flags) {
  decaywatch::RunConfig cfg = resolve_config(flags, "analytic");
  cfg.time_grid = resolve_grid(cfg, flags.points.value_or(101));
  const decaywatch::ChainSpec chain = cfg.make_chain();
  const std::filesystem::path dir = cfg.output_dir;
  decaywatch::ensure_writable_dir(dir);

  if (cfg.format != decaywatch::OutputFormat::Json) {
    decaywatch::write_text_file(dir / "analytic.csv", decaywatch::analytic_csv(chain, cfg.time_grid));
  }
  if (cfg.format != decaywatch::OutputFormat::Csv) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (double t : cfg.time_grid) {
      const auto dist = decaywatch::born_distribution(chain, t);
      const auto cv = decaywatch::currents(chain, dist);
      rows.push_back({{"t", t}, {"probs", dist.probs}, {"net_currents", cv.net}});
    }
    nlohmann::ordered_json doc;
    doc["chain"] = decaywatch::to_json(chain);
    doc["rows"] = rows;
    decaywatch::write_text_file(dir / "analytic.json", doc.dump(2) + "\n");
  }
  decaywatch::write_text_file(dir / "manifest.json",
                              decaywatch::make_manifest("analytic", cfg).dump(2) + "\n");
  std::cout << "analytic: wrote " << cfg.time_grid.size() << " grid rows to " << dir.string()
            << "\n";
  return kExitOk;
}

int cmd_simulate(const RawFlags& flags) {
  const decaywatch::RunConfig cfg = resolve_config(flags, "simulate");
  const decaywatch::ChainSpec chain = cfg.make_chain();
  const std::filesystem::path dir = cfg.output_dir;
  decaywatch::ensure_writable_dir(dir);

  const decaywatch::EnsembleResult result = decaywatch::run_ensemble(
      chain, cfg.query_time, cfg.trials, cfg.master_seed, cfg.threads);
  const decaywatch::ComponentDistribution expected =
      decaywatch::born_distribution(chain, cfg.query_time);

  if (cfg.format != decaywatch::OutputFormat::Json) {
    decaywatch::write_text_file(dir / "histogram.csv",
                                decaywatch::histogram_csv(result, expected.probs));
  }
  if (cfg.format != decaywatch::OutputFormat::Csv) {
    decaywatch::write_text_file(dir / "histogram.json",
                                decaywatch::to_json(result).dump(2) + "\n");
  }
  decaywatch::write_text_file(dir / "manifest.json",
                              decaywatch::make_manifest("simulate", cfg).dump(2) + "\n");
  std::cout << "simulate: " << cfg.trials << " trials at t=" << cfg.query_time << " written to "
            << dir.string() << "\n";
  return kExitOk;
}

int cmd_verify(const RawFlags& flags) {
  const decaywatch::RunConfig cfg = resolve_config(flags, "verify");
  const decaywatch::ChainSpec chain = cfg.make_chain();
  const std::filesystem::path dir = cfg.output_dir;
  decaywatch::ensure_writable_dir(dir);

  const decaywatch::ComponentDistribution expected =
      decaywatch::born_distribution(chain, cfg.query_time);
  const decaywatch::EnsembleResult ensemble = decaywatch::run_ensemble(
      chain, cfg.query_time, cfg.trials, cfg.master_seed, cfg.threads);
  const decaywatch::EnsembleResult oracle = decaywatch::gillespie_oracle(
      chain, cfg.query_time, cfg.trials, cfg.master_seed, cfg.threads);

  const decaywatch::ComparisonReport report = decaywatch::compare(ensemble, expected);
  const decaywatch::ChiSquareResult two_sample =
      decaywatch::two_sample_chi_square(ensemble.count_histogram, oracle.count_histogram);
  const decaywatch::VerifyOutcome outcome =
      decaywatch::evaluate_verification(report, two_sample, ensemble);

  nlohmann::ordered_json doc;
  doc["config"] = decaywatch::to_json(cfg);
  doc["comparison"] = decaywatch::to_json(report);
  doc["oracle_histogram"] = oracle.count_histogram;
  doc["two_sample"] = {{"chi_square", two_sample.statistic},
                       {"degrees_of_freedom", two_sample.degrees_of_freedom},
                       {"p_value", two_sample.p_value}};
  doc["checks"] = decaywatch::to_json(outcome);
  doc["passed"] = outcome.all_passed();
  decaywatch::write_text_file(dir / "report.json", doc.dump(2) + "\n");
  decaywatch::write_text_file(dir / "manifest.json",
                              decaywatch::make_manifest("verify", cfg).dump(2) + "\n");

  for (const decaywatch::VerifyCheck& c : outcome.checks) {
    std::cout << (c.passed ? "pass " : "FAIL ") << c.name << " statistic=" << c.statistic
              << " threshold=" << c.threshold << "\n";
  }
  if (!outcome.all_passed()) {
    std::cerr << "verify: failed check: " << outcome.first_failure() << "\n";
    return kExitStatisticalFailure;
  }
  std::cout << "verify: all checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decaywatch: watched decay-chain simulator and verification harness"};
  app.require_subcommand(1);

  RawFlags analytic_flags;
  RawFlags simulate_flags;
  RawFlags verify_flags;

  CLI::App* analytic = app.add_subcommand(
      "analytic", "evaluate the analytic component weights and currents on a time grid");
  add_common_flags(analytic, analytic_flags);
  analytic->add_option("--grid", analytic_flags.grid, "explicit time grid")->delimiter(',');
  analytic->add_option("--points", analytic_flags.points,
                       "grid points over [0, time] when --grid is absent");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run an observer ensemble and write the count histogram");
  add_common_flags(simulate, simulate_flags);

  CLI::App* verify = app.add_subcommand(
      "verify", "compare the cycle ensemble against the analytic law and the jump oracle");
  add_common_flags(verify, verify_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analytic->parsed()) return cmd_analytic(analytic_flags);
    if (simulate->parsed()) return cmd_simulate(simulate_flags);
    return cmd_verify(verify_flags);
  } catch (const decaywatch::InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kExitInsufficientData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
