#include "sot/metrics/metrics.hpp"

#include "sot/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace sot::metrics {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double avg_paths(std::span<const RunRecord> records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "avg_paths over no records");
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.label != records.front().label)
      throw Error(ErrorCode::MixedStrategies, "records mix '" + records.front().label + "' and '" + r.label + "'");
    sum += r.path_count;
  }
  return sum / static_cast<double>(records.size());
}

double avg_tokens(std::span<const RunRecord> records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "avg_tokens over no records");
  double sum = 0.0;
  for (const auto& r : records) sum += static_cast<double>(r.tokens_total);
  return sum / static_cast<double>(records.size());
}

AccuracySummary aggregate_accuracy(std::span<const double> per_seed) {
  if (per_seed.empty()) throw Error(ErrorCode::InvalidArgument, "no seed accuracies");
  double mean = 0.0;
  for (double a : per_seed) mean += a;
  mean /= static_cast<double>(per_seed.size());
  if (per_seed.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double a : per_seed) ss += (a - mean) * (a - mean);
  return {mean, std::sqrt(ss / static_cast<double>(per_seed.size() - 1))};
}

AccuracySummary aggregate_accuracy(std::span<const RunRecord> records) {
  std::map<std::int64_t, std::pair<std::set<std::string>, std::size_t>> by_seed;
  for (const auto& r : records) {
    auto& [ids, correct] = by_seed[r.seed];
    ids.insert(r.problem_id);
    if (r.correct) ++correct;
  }
  if (by_seed.empty()) throw Error(ErrorCode::InvalidArgument, "no records");
  std::vector<double> accuracies;
  const auto& reference = by_seed.begin()->second.first;
  for (const auto& [seed, group] : by_seed) {
    if (group.first != reference) {
      throw Error(ErrorCode::UnevenSeedGroups, "seed " + std::to_string(seed) + " covers a different problem set");
    }
    accuracies.push_back(static_cast<double>(group.second) / static_cast<double>(group.first.size()));
  }
  return aggregate_accuracy(accuracies);
}

std::string format_accuracy(double mean, double std) {
  return fmt::format("{:.1f}±{:.1f}%", mean * 100.0, std * 100.0);
}

std::vector<StrategyReport> build_reports(std::span<const RunRecord> records) {
  std::map<std::string, std::vector<RunRecord>> groups;
  for (const auto& r : records) groups[r.label].push_back(r);

  std::vector<StrategyReport> reports;
  for (const auto& [label, group] : groups) {
    StrategyReport rep;
    rep.strategy = label;
    const auto acc = aggregate_accuracy(std::span<const RunRecord>(group));
    rep.accuracy_mean = acc.mean;
    rep.accuracy_std = acc.std;
    rep.avg_paths = avg_paths(group);
    rep.avg_tokens = avg_tokens(group);
    std::set<std::string> problems;
    std::set<std::int64_t> seeds;
    for (const auto& r : group) {
      problems.insert(r.problem_id);
      seeds.insert(r.seed);
      if (r.failure) ++rep.n_failures;
    }
    rep.n_problems = problems.size();
    rep.n_seeds = seeds.size();
    if (rep.avg_tokens == 0.0) {
      rep.warnings.push_back("zero tokens per problem: the calls report no usage (replay of a zero-usage recording?)");
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

nlohmann::json report_json(std::span<const StrategyReport> reports) {
  nlohmann::json strategies = nlohmann::json::array();
  for (const auto& r : reports) {
    strategies.push_back({
        {"strategy", r.strategy},
        {"accuracy_mean", r.accuracy_mean},
        {"accuracy_std", r.accuracy_std},
        {"accuracy", format_accuracy(r.accuracy_mean, r.accuracy_std)},
        {"avg_paths", r.avg_paths},
        {"avg_tokens", r.avg_tokens},
        {"n_problems", r.n_problems},
        {"n_seeds", r.n_seeds},
        {"n_failures", r.n_failures},
        {"warnings", r.warnings},
    });
  }
  return {
      {"strategies", std::move(strategies)},
      {"path_conventions",
       {
           {"cot", "1 per problem"},
           {"cot_sc", "n per problem (one per sampled chain)"},
           {"sot", "mu per problem (one per syzygy; freeness calls add tokens only)"},
           {"got", "one per invocation that yields a complete candidate; expansion calls add tokens only"},
           {"aot", "one per solve() call along the chain"},
       }},
  };
}

std::string bubble_csv(std::span<const StrategyReport> reports) {
  std::string out = "strategy,avg_paths,accuracy_mean,avg_tokens\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f}\n", csv_field(r.strategy), r.avg_paths, r.accuracy_mean, r.avg_tokens);
  }
  return out;
}

void export_report(std::span<const StrategyReport> reports, const std::filesystem::path& out_dir) {
  if (reports.empty()) throw Error(ErrorCode::EmptyReport, "no strategy reports to export");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "report.json", report_json(reports).dump(2) + "\n");
  write_file(out_dir / "bubble.csv", bubble_csv(reports));
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingRecords, path.string());
  std::vector<RunRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    try {
      if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, "not valid JSON");
      records.push_back(run_record_from_json(j));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::MalformedLine, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_records(std::span<const RunRecord> records, const std::filesystem::path& path) {
  std::string content;
  for (const auto& r : records) content += to_json(r).dump() + "\n";
  write_file(path, content);
}

}  // namespace sot::metrics
