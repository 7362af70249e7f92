#include "sot/cli/commands.hpp"
#include "sot/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

namespace {

int exit_code_for(sot::ErrorCode code) {
  switch (code) {
    case sot::ErrorCode::BadConfig:
    case sot::ErrorCode::MissingFile:
    case sot::ErrorCode::MissingTemplate:
    case sot::ErrorCode::MalformedLine:
    case sot::ErrorCode::BadGold:
      return 2;
    case sot::ErrorCode::Storage:
      return 3;
    case sot::ErrorCode::MissingRecords:
      return 4;
    default:
      return 1;
  }
}

void print_reports(const std::vector<sot::metrics::StrategyReport>& reports) {
  for (const auto& r : reports) {
    std::cout << fmt::format("{:<22} acc {:>12}  avg_paths {:.2f}  avg_tokens {:.1f}  problems {}  seeds {}\n",
                             r.strategy, sot::metrics::format_accuracy(r.accuracy_mean, r.accuracy_std), r.avg_paths,
                             r.avg_tokens, r.n_problems, r.n_seeds);
    for (const auto& w : r.warnings) std::cout << "  warning: " << w << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SoT, CoT and CoT-SC reasoning evaluation with path and token accounting"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Evaluate one strategy over a dataset for every configured seed");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();

  std::string sweep_config;
  std::string sweep_kind;
  auto* sweep = app.add_subcommand("sweep", "Run an ablation grid (betti or temperature)");
  sweep->add_option("--config", sweep_config, "Base run configuration (JSON)")->required();
  sweep->add_option("--kind", sweep_kind, "betti | temperature")->required()->check(CLI::IsMember({"betti", "temperature"}));

  std::vector<std::string> report_dirs;
  std::string report_out = ".";
  auto* report = app.add_subcommand("report", "Recompute and merge reports from run directories");
  report->add_option("dirs", report_dirs, "Run directories containing records.jsonl")->required();
  report->add_option("--out", report_out, "Where to write report.json and bubble.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto summary = sot::cli::cmd_run(config_path);
      std::cout << fmt::format("run dir: {}\nrecords: {}  failures: {}  transport calls: {}\n",
                               summary.run_dir.string(), summary.n_records, summary.n_failures,
                               summary.transport_calls);
      print_reports(summary.reports);
    } else if (*sweep) {
      const auto cells = sot::cli::cmd_sweep(sweep_config, sot::cli::sweep_kind_from_string(sweep_kind));
      std::cout << fmt::format("{} cells written\n", cells.size());
      for (const auto& c : cells) {
        if (c.summary.reports.empty()) continue;
        const auto& r = c.summary.reports.front();
        std::cout << fmt::format("{:<28} {:>12}  avg_tokens {:.1f}\n", c.cell,
                                 sot::metrics::format_accuracy(r.accuracy_mean, r.accuracy_std), r.avg_tokens);
      }
    } else if (*report) {
      std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
      print_reports(sot::cli::cmd_report(dirs, report_out));
    }
  } catch (const sot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
