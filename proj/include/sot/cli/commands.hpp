#pragma once

#include "sot/cli/config.hpp"
#include "sot/metrics/metrics.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sot::cli {

struct RunSummary {
  std::filesystem::path run_dir;
  std::size_t n_records = 0;
  std::size_t n_failures = 0;
  std::uint64_t transport_calls = 0;
  std::vector<metrics::StrategyReport> reports;
};

/// Runs every (seed, problem) cell of `config` and writes config.snapshot.json,
/// calls.jsonl, records.jsonl, report.json and bubble.csv into `run_dir`.
RunSummary execute_run(const RunConfig& config, const std::filesystem::path& run_dir);

RunSummary cmd_run(const std::filesystem::path& config_path);

enum class SweepKind { Betti, Temperature };

SweepKind sweep_kind_from_string(std::string_view name);

struct SweepCell {
  std::string cell;
  std::string strategy;
  int beta = 0;
  int mu = 0;
  double temperature = 0.0;
  RunSummary summary;
};

/// Betti: forced (beta, mu) over {1..10} x {1,2,3}. Temperature: sot and cot
/// at 0.0, 0.1, ..., 1.0. Writes one run directory per cell plus sweep.csv.
/// Five seeds per temperature cell: the configured seeds, truncated or
/// extended with consecutive values above the largest.
inline constexpr std::size_t kTemperatureSweepSeeds = 5;
std::vector<std::int64_t> temperature_sweep_seeds(std::span<const std::int64_t> seeds);

std::vector<SweepCell> execute_sweep(const RunConfig& base, SweepKind kind);
std::vector<SweepCell> cmd_sweep(const std::filesystem::path& config_path, SweepKind kind);

std::string sweep_csv(std::span<const SweepCell> cells);

/// Recomputes reports from each directory's records.jsonl and writes the
/// merged report.json and bubble.csv into `out_dir`.
std::vector<metrics::StrategyReport> cmd_report(std::span<const std::filesystem::path> run_dirs,
                                                const std::filesystem::path& out_dir);

/// Orders problem ids by file name, then numerically by line.
bool problem_id_less(const std::string& a, const std::string& b);

}  // namespace sot::cli
