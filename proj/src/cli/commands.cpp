#include "sot/cli/commands.hpp"

#include "sot/backend/http.hpp"
#include "sot/backend/mock.hpp"
#include "sot/baselines/baselines.hpp"
#include "sot/error.hpp"
#include "sot/pipeline/sot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace sot::cli {
namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
}

std::shared_ptr<backend::Transport> make_transport(const BackendConfig& cfg) {
  if (cfg.kind == BackendConfig::Kind::Mock) {
    return std::make_shared<backend::MockTransport>(backend::MockScript::load(cfg.mock_script));
  }
  backend::HttpConfig http;
  http.base_url = cfg.base_url;
  if (const char* key = std::getenv("SOT_API_KEY")) http.api_key = key;
  http.timeout = std::chrono::seconds(cfg.timeout_s);
  return std::make_shared<backend::HttpTransport>(std::move(http));
}

struct Cell {
  std::int64_t seed;
  const Problem* problem;
};

struct CellResult {
  RunRecord record;
  std::vector<backend::CallRecord> calls;
};

CellResult run_cell(const RunConfig& config, const Cell& cell, const pipeline::PromptTemplateSet& templates,
                    backend::Completer& completer) {
  backend::CallLog log(fmt::format("s{}/{}", cell.seed, cell.problem->id));
  pipeline::LlmSession session{completer, log, config.retry, config.model, config.decoding, config.stage_decoding,
                               cell.seed};
  RunRecord record;
  switch (config.strategy.name) {
    case Strategy::Cot:
      record = baselines::run_cot(*cell.problem, templates, session, cell.seed);
      break;
    case Strategy::CotSc:
      record = baselines::run_cot_sc(*cell.problem, config.strategy.n, templates, session, cell.seed);
      break;
    case Strategy::Sot: {
      pipeline::PipelineConfig pcfg;
      pcfg.forced = config.strategy.forced;
      pcfg.beta_max = config.strategy.beta_max;
      pcfg.mu_max = config.strategy.mu_max;
      record = pipeline::run_sot(*cell.problem, pcfg, templates, session, cell.seed);
      break;
    }
  }
  return {std::move(record), log.records()};
}

std::string calls_block(const std::vector<backend::CallRecord>& calls) {
  std::string out;
  for (const auto& c : calls) out += to_json(c).dump() + "\n";
  return out;
}

}  // namespace

bool problem_id_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& id) -> std::pair<std::string, std::optional<std::uint64_t>> {
    const auto hash = id.rfind('#');
    if (hash == std::string::npos || hash + 1 == id.size()) return {id, std::nullopt};
    const auto tail = id.substr(hash + 1);
    if (tail.size() > 18 || tail.find_first_not_of("0123456789") != std::string::npos) return {id, std::nullopt};
    return {id.substr(0, hash), std::stoull(tail)};
  };
  const auto [pa, na] = split(a);
  const auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na && nb && *na != *nb) return *na < *nb;
  return a < b;
}

RunSummary execute_run(const RunConfig& config, const std::filesystem::path& run_dir) {
  config.validate();
  const auto templates = pipeline::PromptTemplateSet::load(config.templates);
  const auto problems = datasets::load_dataset(config.dataset);

  std::error_code ec;
  std::filesystem::create_directories(run_dir, ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot create " + run_dir.string() + ": " + ec.message());
  write_text(run_dir / "config.snapshot.json", config.to_json().dump(2) + "\n");

  std::optional<backend::ResponseCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);
  backend::Completer completer(make_transport(config.backend), std::move(cache));

  std::vector<Cell> cells;
  for (auto seed : config.seeds) {
    for (const auto& p : problems) cells.push_back({seed, &p});
  }

  std::ofstream calls_out(run_dir / "calls.jsonl", std::ios::binary | std::ios::trunc);
  if (!calls_out) throw Error(ErrorCode::Storage, "cannot write " + (run_dir / "calls.jsonl").string());
  std::mutex calls_mutex;

  std::vector<std::optional<RunRecord>> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!abort.load()) {
      const auto i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        auto result = run_cell(config, cells[i], templates, completer);
        {
          std::lock_guard lock(calls_mutex);
          calls_out << calls_block(result.calls);
          calls_out.flush();
          if (!calls_out) throw Error(ErrorCode::Storage, "cannot append to calls.jsonl");
        }
        records[i] = std::move(result.record);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        abort = true;
      }
    }
  };

  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), std::max<std::size_t>(cells.size(), 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  calls_out.close();

  std::vector<RunRecord> sorted;
  sorted.reserve(records.size());
  for (auto& r : records) sorted.push_back(std::move(*r));
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.seed != b.seed) return a.seed < b.seed;
    return problem_id_less(a.problem_id, b.problem_id);
  });
  metrics::write_records(sorted, run_dir / "records.jsonl");

  // Reports come from the file, exactly as `report` recomputes them.
  const auto reread = metrics::read_records(run_dir / "records.jsonl");
  RunSummary summary;
  summary.run_dir = run_dir;
  summary.n_records = reread.size();
  summary.n_failures = static_cast<std::size_t>(
      std::count_if(reread.begin(), reread.end(), [](const RunRecord& r) { return r.failure.has_value(); }));
  summary.transport_calls = completer.transport_calls();
  if (!reread.empty()) {
    summary.reports = metrics::build_reports(reread);
    metrics::export_report(summary.reports, run_dir);
  }
  return summary;
}

RunSummary cmd_run(const std::filesystem::path& config_path) {
  const auto config = RunConfig::load(config_path);
  return execute_run(config, config.out_dir);
}

std::vector<std::int64_t> temperature_sweep_seeds(std::span<const std::int64_t> seeds) {
  std::vector<std::int64_t> out(seeds.begin(), seeds.begin() + std::min<std::size_t>(seeds.size(), kTemperatureSweepSeeds));
  std::int64_t next = out.empty() ? 1 : *std::max_element(out.begin(), out.end()) + 1;
  while (out.size() < kTemperatureSweepSeeds) out.push_back(next++);
  return out;
}

SweepKind sweep_kind_from_string(std::string_view name) {
  if (name == "betti") return SweepKind::Betti;
  if (name == "temperature") return SweepKind::Temperature;
  throw Error(ErrorCode::BadConfig, "sweep kind must be betti or temperature");
}

std::vector<SweepCell> execute_sweep(const RunConfig& base, SweepKind kind) {
  base.validate();
  std::vector<SweepCell> cells;

  auto run_cell_dir = [&](RunConfig cfg, SweepCell cell) {
    cell.summary = execute_run(cfg, base.out_dir / cell.cell);
    cells.push_back(std::move(cell));
  };

  if (kind == SweepKind::Betti) {
    if (base.strategy.name != Strategy::Sot) throw Error(ErrorCode::BadConfig, "strategy: betti sweep requires sot");
    for (int beta = 1; beta <= 10; ++beta) {
      for (int mu = 1; mu <= 3; ++mu) {
        RunConfig cfg = base;
        cfg.strategy.beta_max = std::max(cfg.strategy.beta_max, beta);
        cfg.strategy.mu_max = std::max(cfg.strategy.mu_max, mu);
        cfg.strategy.forced = std::pair{beta, mu};
        SweepCell cell;
        cell.cell = fmt::format("betti_b{:02}_m{}", beta, mu);
        cell.strategy = pipeline::sot_label({cfg.strategy.forced, cfg.strategy.beta_max, cfg.strategy.mu_max});
        cell.beta = beta;
        cell.mu = mu;
        cell.temperature = cfg.decoding.temperature;
        run_cell_dir(std::move(cfg), std::move(cell));
      }
    }
  } else {
    const auto sot_forced =
        base.strategy.name == Strategy::Sot && base.strategy.forced ? *base.strategy.forced : std::pair{7, 3};
    for (Strategy strategy : {Strategy::Sot, Strategy::Cot}) {
      for (int step = 0; step <= 10; ++step) {
        const double t = step / 10.0;
        RunConfig cfg = base;
        cfg.strategy.name = strategy;
        cfg.strategy.forced = strategy == Strategy::Sot ? std::optional(sot_forced) : std::nullopt;
        cfg.strategy.beta_max = std::max(cfg.strategy.beta_max, sot_forced.first);
        cfg.strategy.mu_max = std::max(cfg.strategy.mu_max, sot_forced.second);
        cfg.seeds = temperature_sweep_seeds(base.seeds);
        cfg.decoding.temperature = t;
        for (auto& [stage, d] : cfg.stage_decoding) d.temperature = t;
        SweepCell cell;
        cell.cell = fmt::format("temperature_{}_t{:.1f}", to_string(strategy), t);
        cell.strategy = strategy == Strategy::Sot ? pipeline::sot_label({cfg.strategy.forced}) : "cot";
        if (strategy == Strategy::Sot) {
          cell.beta = sot_forced.first;
          cell.mu = sot_forced.second;
        }
        cell.temperature = t;
        run_cell_dir(std::move(cfg), std::move(cell));
      }
    }
  }

  write_text(base.out_dir / "sweep.csv", sweep_csv(cells));
  return cells;
}

std::vector<SweepCell> cmd_sweep(const std::filesystem::path& config_path, SweepKind kind) {
  return execute_sweep(RunConfig::load(config_path), kind);
}

std::string sweep_csv(std::span<const SweepCell> cells) {
  std::string out = "cell,strategy,beta,mu,temperature,accuracy_mean,accuracy_std,avg_paths,avg_tokens\n";
  for (const auto& c : cells) {
    const auto& reports = c.summary.reports;
    const double mean = reports.empty() ? 0.0 : reports.front().accuracy_mean;
    const double std = reports.empty() ? 0.0 : reports.front().accuracy_std;
    const double paths = reports.empty() ? 0.0 : reports.front().avg_paths;
    const double tokens = reports.empty() ? 0.0 : reports.front().avg_tokens;
    out += fmt::format("{},\"{}\",{},{},{:.1f},{:.6f},{:.6f},{:.6f},{:.6f}\n", c.cell, c.strategy, c.beta, c.mu,
                       c.temperature, mean, std, paths, tokens);
  }
  return out;
}

std::vector<metrics::StrategyReport> cmd_report(std::span<const std::filesystem::path> run_dirs,
                                                const std::filesystem::path& out_dir) {
  if (run_dirs.empty()) throw Error(ErrorCode::MissingRecords, "no run directories given");
  std::vector<RunRecord> all;
  for (const auto& dir : run_dirs) {
    const auto path = dir / "records.jsonl";
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingRecords, dir.string());
    auto records = metrics::read_records(path);
    all.insert(all.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
  }
  auto reports = metrics::build_reports(all);
  metrics::export_report(reports, out_dir);
  return reports;
}

}  // namespace sot::cli
