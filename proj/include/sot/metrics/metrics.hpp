#pragma once

#include "sot/run_record.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sot::metrics {

struct StrategyReport {
  std::string strategy;  // the record label, e.g. "cot_sc(n=5)"
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double avg_paths = 0.0;
  double avg_tokens = 0.0;
  std::size_t n_problems = 0;
  std::size_t n_seeds = 0;
  std::size_t n_failures = 0;
  std::vector<std::string> warnings;
};

struct AccuracySummary {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean path_count. Throws MixedStrategies unless every record shares a label.
double avg_paths(std::span<const RunRecord> records);

/// Mean tokens_total.
double avg_tokens(std::span<const RunRecord> records);

/// Mean and sample (n - 1) standard deviation; std is 0 for one value.
AccuracySummary aggregate_accuracy(std::span<const double> per_seed_accuracy);

/// Groups by seed; every seed must cover the same problem ids, otherwise
/// UnevenSeedGroups.
AccuracySummary aggregate_accuracy(std::span<const RunRecord> records);

/// "96.4±0.6%".
std::string format_accuracy(double mean, double std);

/// One report per label, sorted by label.
std::vector<StrategyReport> build_reports(std::span<const RunRecord> records);

nlohmann::json report_json(std::span<const StrategyReport> reports);
std::string bubble_csv(std::span<const StrategyReport> reports);

/// Writes report.json and bubble.csv. Throws EmptyReport (nothing written) or
/// Storage.
void export_report(std::span<const StrategyReport> reports, const std::filesystem::path& out_dir);

/// One record per line. Throws MissingRecords or MalformedLine.
std::vector<RunRecord> read_records(const std::filesystem::path& path);
void write_records(std::span<const RunRecord> records, const std::filesystem::path& path);

}  // namespace sot::metrics
