// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include "sot/baselines/baselines.hpp"
#include "sot/cli/commands.hpp"
#include "sot/cli/config.hpp"
#include "sot/datasets/canonicalize.hpp"
#include "sot/error.hpp"
#include "sot/metrics/metrics.hpp"
#include "sot/pipeline/extract.hpp"
#include "sot/pipeline/sot.hpp"

#include "support/fake_server.hpp"
#include "support/fixtures.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>

using namespace sot;
namespace fs = std::filesystem;
using sot::testing::TempDir;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
    ok_ = ok_ && ok;
  }
  Outcome done(std::string detail) const { return {ok_, ok_ ? std::move(detail) : failure_}; }

 private:
  bool ok_ = true;
  std::string failure_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void prepare(const TempDir& dir, int n_problems, const nlohmann::json& script = sot::testing::cooperative_script()) {
  sot::testing::write_file(dir / "script.json", script.dump(2));
  sot::testing::write_numeric_dataset(dir / "data.jsonl", n_problems);
}

cli::RunSummary run_in(const TempDir& dir, nlohmann::json strategy, const std::string& out,
                       const std::function<void(nlohmann::json&)>& tweak = {}) {
  auto j = sot::testing::base_config(dir.path(), std::move(strategy));
  j["out_dir"] = (dir / out).string();
  if (tweak) tweak(j);
  const auto config = cli::RunConfig::from_json(j, dir.path());
  return cli::execute_run(config, config.out_dir);
}

std::vector<nlohmann::json> jsonl(const fs::path& path) {
  std::vector<nlohmann::json> out;
  for (const auto& line : sot::testing::read_lines(path)) out.push_back(nlohmann::json::parse(line));
  return out;
}

Outcome path_count_laws() {
  const auto start = Clock::now();
  TempDir dir;
  prepare(dir, 20);
  Check c;
  const std::vector<std::pair<nlohmann::json, double>> cases{
      {{{"name", "cot"}}, 1.0},
      {{{"name", "cot_sc"}, {"n", 5}}, 5.0},
      {{{"name", "sot"}, {"beta", 7}, {"mu", 1}}, 1.0},
      {{{"name", "sot"}, {"beta", 7}, {"mu", 3}}, 3.0},
      {{{"name", "sot"}, {"beta", 7}, {"mu", 7}}, 7.0},
  };
  std::string seen;
  int i = 0;
  for (const auto& [strategy, expected] : cases) {
    const auto s = run_in(dir, strategy, "run" + std::to_string(i++));
    c.expect(s.n_records == 20, "expected 20 records");
    c.expect(s.n_failures == 0, "unexpected failures");
    c.expect(s.reports.size() == 1 && s.reports[0].avg_paths == expected,
             fmt::format("{}: avg_paths {} != {}", strategy.dump(), s.reports.empty() ? -1.0 : s.reports[0].avg_paths,
                         expected));
    if (!s.reports.empty()) seen += fmt::format(" {}={}", s.reports[0].strategy, s.reports[0].avg_paths);
  }
  const double t = seconds_since(start);
  c.expect(t < 5.0, fmt::format("took {:.2f} s (limit 5 s)", t));
  return c.done(fmt::format("20 problems:{} ({:.2f} s)", seen, t));
}

Outcome call_count_identity() {
  const auto start = Clock::now();
  TempDir dir;
  prepare(dir, 20);
  Check c;
  const auto s = run_in(dir, {{"name", "sot"}, {"beta", 7}, {"mu", 3}}, "run");
  std::map<std::string, int> per_problem;
  for (const auto& call : jsonl(dir / "run" / "calls.jsonl")) {
    const auto id = call["call_id"].get<std::string>();
    per_problem[id.substr(0, id.rfind('/'))]++;
    c.expect(call["stage"] != "freeness_reask" && call["stage"] != "score_reask", "unexpected re-ask");
  }
  c.expect(per_problem.size() == 20, "expected 20 problems in calls.jsonl");
  for (const auto& [cell, n] : per_problem) c.expect(n == 13, fmt::format("{} logged {} calls", cell, n));
  c.expect(s.transport_calls == 20 * 13, "transport call count differs");
  const double t = seconds_since(start);
  c.expect(t < 5.0, fmt::format("took {:.2f} s (limit 5 s)", t));
  return c.done(fmt::format("13 calls for each of {} problems ({:.2f} s)", per_problem.size(), t));
}

Outcome sequential_freeness() {
  std::mt19937 rng(20240611);
  const std::vector<std::string> facts{
      "The red group has nine members.",
      "Blue and red together form the whole set.",
      "Each part is counted exactly once.",
      "The unknown is the size of the union.",
      "Doubling nine gives eighteen.",
      "No marble is both red and blue.",
      "The question asks for a count, not a ratio.",
      "Counting by parts preserves the total.",
  };
  Check c;
  int runs = 0;
  std::size_t prompts_checked = 0;
  for (int r = 0; r < 60; ++r) {
    const int beta = 2 + static_cast<int>(rng() % 9);
    const int mu = 1 + static_cast<int>(rng() % 3);
    std::vector<std::string> pool = facts;
    std::shuffle(pool.begin(), pool.end(), rng);
    auto script = sot::testing::cooperative_script();
    script["rules"][2] = {{"match", "State auxiliary condition"}, {"responses", pool}, {"usage", {80, 12}}};

    backend::Completer completer(sot::testing::mock(script));
    backend::CallLog log(fmt::format("run{}", r));
    auto session = sot::testing::make_session(completer, log, 0.7);
    pipeline::PipelineConfig cfg;
    cfg.forced = std::pair{beta, mu};
    const auto problem =
        sot::testing::numeric_problem(fmt::format("gen#{}", r), fmt::format("Question variant {}: 9 + 9?", rng()));
    const auto rec = pipeline::run_sot(problem, cfg, pipeline::PromptTemplateSet::defaults(), session, r);
    ++runs;
    c.expect(!rec.failure, "run failed");
    const auto& conds = rec.trace["conditions"];
    c.expect(conds.size() == static_cast<std::size_t>(beta), "wrong number of conditions");

    std::vector<std::string> freeness_prompts;
    for (const auto& call : log.records()) {
      if (call.stage == "freeness") freeness_prompts.push_back(call.prompt);
    }
    c.expect(freeness_prompts.size() == static_cast<std::size_t>(beta), "wrong number of freeness prompts");
    for (std::size_t j = 0; j < freeness_prompts.size(); ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const auto text = conds[i]["text"].get<std::string>();
        c.expect(freeness_prompts[j].find(text) != std::string::npos,
                 fmt::format("run {}: prompt {} misses condition {}", r, j + 1, i + 1));
      }
      ++prompts_checked;
    }
  }
  return c.done(fmt::format("{} runs, {} freeness prompts, 0 violations", runs, prompts_checked));
}

Outcome vote_oracle() {
  const auto start = Clock::now();
  const std::vector<CanonicalAnswer> alphabet{CanonicalAnswer::of_number(Rational(7)),
                                              CanonicalAnswer::of_number(Rational(1, 2)),
                                              CanonicalAnswer::of_text("seven")};
  Check c;
  int cases = 0;
  for (int len = 0; len <= 5; ++len) {
    const int total = static_cast<int>(std::pow(3, len));
    for (int code = 0; code < total; ++code) {
      ++cases;
      std::vector<CanonicalAnswer> seq;
      for (int i = 0, v = code; i < len; ++i, v /= 3) seq.push_back(alphabet[v % 3]);
      if (seq.empty()) {
        bool threw = false;
        try {
          baselines::majority_vote(seq);
        } catch (const Error&) {
          threw = true;
        }
        c.expect(threw, "empty vote did not throw");
        continue;
      }
      // Brute force: for every candidate count its occurrences by pairwise
      // comparison; keep the highest count, ties to the canonically smaller.
      std::optional<CanonicalAnswer> best;
      int best_count = 0;
      for (const auto& cand : seq) {
        int count = 0;
        for (const auto& other : seq) count += (cand == other) ? 1 : 0;
        if (count > best_count || (count == best_count && cand < *best)) {
          best = cand;
          best_count = count;
        }
      }
      c.expect(baselines::majority_vote(seq).winner == *best, fmt::format("mismatch on case {}", code));
    }
  }
  const double t = seconds_since(start);
  c.expect(cases == 364, fmt::format("{} cases instead of 364", cases));
  c.expect(t < 1.0, fmt::format("took {:.3f} s (limit 1 s)", t));
  return c.done(fmt::format("{} cases exact ({:.3f} s)", cases, t));
}

std::vector<char> labels_of(const nlohmann::json& entry) {
  std::vector<char> out;
  if (entry.contains("labels")) {
    for (char ch : entry["labels"].get<std::string>()) out.push_back(ch);
  }
  return out;
}

Outcome extraction_and_grading() {
  Check c;
  const auto corpus = jsonl(sot::testing::data_dir() / "extraction_corpus.jsonl");
  const auto pairs = jsonl(sot::testing::data_dir() / "canonicalization_pairs.jsonl");
  c.expect(corpus.size() >= 30, "extraction corpus has fewer than 30 entries");
  c.expect(pairs.size() >= 20, "canonicalization corpus has fewer than 20 pairs");
  std::size_t extracted = 0, graded = 0;
  for (const auto& e : corpus) {
    const auto labels = labels_of(e);
    const auto kind = task_kind_from_string(e["kind"].get<std::string>());
    const auto got = pipeline::try_extract_final_answer(e["text"].get<std::string>(), kind, labels);
    const bool ok = got && to_json(got->answer) == e["expected"] &&
                    datasets::grade(got->answer, answer_from_json(e["expected"]));
    c.expect(ok, "extraction mismatch: " + e["text"].get<std::string>());
    extracted += ok;
  }
  std::set<std::string> required{"$1,234.", "3/4", "(b)"};
  for (const auto& p : pairs) {
    const auto raw = p["raw"].get<std::string>();
    required.erase(raw);
    bool ok = false;
    try {
      const auto labels = labels_of(p);
      ok = to_json(datasets::canonicalize(raw, task_kind_from_string(p["kind"].get<std::string>()), labels)) ==
           p["expected"];
    } catch (const Error&) {
    }
    c.expect(ok, "canonicalization mismatch: " + raw);
    graded += ok;
  }
  c.expect(required.empty(), "required canonicalization pairs missing");
  return c.done(fmt::format("extraction {}/{}, canonicalization {}/{}", extracted, corpus.size(), graded,
                            pairs.size()));
}

Outcome determinism() {
  TempDir dir;
  prepare(dir, 8);
  Check c;
  const std::vector<nlohmann::json> strategies{
      {{"name", "sot"}}, {{"name", "sot"}, {"beta", 3}, {"mu", 2}}, {{"name", "cot_sc"}, {"n", 5}}, {{"name", "cot"}}};
  int i = 0;
  for (const auto& strategy : strategies) {
    auto seeds = [](nlohmann::json& j) { j["seeds"] = {1, 2, 3}; };
    auto parallel = [](nlohmann::json& j) {
      j["seeds"] = {1, 2, 3};
      j["parallelism"] = 4;
    };
    run_in(dir, strategy, fmt::format("a{}", i), seeds);
    run_in(dir, strategy, fmt::format("b{}", i), seeds);
    run_in(dir, strategy, fmt::format("c{}", i), parallel);
    const auto a = sot::testing::read_file(dir / fmt::format("a{}", i) / "records.jsonl");
    c.expect(!a.empty(), "empty records.jsonl");
    c.expect(a == sot::testing::read_file(dir / fmt::format("b{}", i) / "records.jsonl"),
             strategy.dump() + ": repeated run differs");
    c.expect(a == sot::testing::read_file(dir / fmt::format("c{}", i) / "records.jsonl"),
             strategy.dump() + ": parallel run differs");
    ++i;
  }
  return c.done(fmt::format("{} strategies x 3 executions, records.jsonl byte-identical", strategies.size()));
}

/// An endpoint that answers every stage prompt in the expected shape.
void live_like(const nlohmann::json& body, httplib::Response& res) {
  const auto& messages = body["messages"];
  const auto prompt = messages.back()["content"].get<std::string>();
  const auto h = std::hash<std::string>{}(prompt + body.value("seed", nlohmann::json(nullptr)).dump());
  std::string reply;
  if (prompt.find("Reply with a single JSON object") != std::string::npos) reply = R"({"beta": 3, "mu": 2})";
  else if (prompt.find("State auxiliary condition") != std::string::npos) reply = fmt::format("Fact {}.", h % 1000);
  else if (prompt.find("Write candidate solution") != std::string::npos) reply = fmt::format("... #### {}", 17 + h % 3);
  else if (prompt.find("minimality cost") != std::string::npos) reply = std::to_string(h % 60);
  else reply = fmt::format("Step by step.\n#### {}", 17 + h % 3);
  sot::testing::FakeChatServer::reply(res, reply, static_cast<int>(50 + prompt.size() % 50), static_cast<int>(5 + h % 40));
}

Outcome replay() {
  TempDir dir;
  prepare(dir, 5);
  sot::testing::FakeChatServer server(live_like);
  Check c;
  auto remote = [&](nlohmann::json& j) {
    j["backend"] = {{"kind", "remote"}, {"base_url", server.base_url()}, {"timeout_s", 10}};
    j["cache_dir"] = (dir / "cache").string();
    j["seeds"] = {1, 2};
  };
  run_in(dir, {{"name", "sot"}}, "record_sot", remote);
  run_in(dir, {{"name", "cot_sc"}, {"n", 3}}, "record_sc", remote);
  const int recorded = server.requests();
  c.expect(recorded > 0, "recording made no requests");

  const auto sot_replay = run_in(dir, {{"name", "sot"}}, "replay_sot", remote);
  const auto sc_replay = run_in(dir, {{"name", "cot_sc"}, {"n", 3}}, "replay_sc", remote);
  const int extra = server.requests() - recorded;
  c.expect(extra == 0, fmt::format("warm replay issued {} requests", extra));
  c.expect(sot_replay.transport_calls == 0 && sc_replay.transport_calls == 0, "replay reached the transport");
  for (const auto* name : {"sot", "sc"}) {
    c.expect(sot::testing::read_file(dir / fmt::format("record_{}", name) / "records.jsonl") ==
                 sot::testing::read_file(dir / fmt::format("replay_{}", name) / "records.jsonl"),
             fmt::format("{} replay records differ", name));
  }
  return c.done(fmt::format("recorded {} requests, replay issued {}; records byte-identical", recorded, extra));
}

Outcome accounting_conservation() {
  TempDir dir;
  Check c;
  // A script with re-asks and unparseable output exercises the failure paths.
  auto rough = sot::testing::cooperative_script();
  rough["rules"][0] = {{"match", "minimality cost"}, {"responses", {"12", "looks fine", "95"}}, {"usage", {150, 2}}};
  rough["rules"][1] = {{"match", "Write candidate solution"},
                       {"responses", {"#### 18", "no final line here", "#### 20"}},
                       {"usage", {120, 60}}};
  rough["rules"].push_back(sot::testing::rule("Reply with a single number", "40", 30, 1));
  rough["rules"].push_back(sot::testing::rule("Reply with only a JSON object", "{\"beta\": 2, \"mu\": 3}", 20, 8));

  int fixtures = 0;
  for (const auto& script : {sot::testing::cooperative_script(), rough}) {
    TempDir sub;
    prepare(sub, 6, script);
    for (const auto& strategy : std::vector<nlohmann::json>{{{"name", "cot"}},
                                                            {{"name", "cot_sc"}, {"n", 5}},
                                                            {{"name", "sot"}},
                                                            {{"name", "sot"}, {"beta", 7}, {"mu", 3}}}) {
      const auto out = fmt::format("run{}", fixtures++);
      const auto s = run_in(sub, strategy, out, [](nlohmann::json& j) { j["seeds"] = {1, 2}; });
      std::int64_t call_sum = 0;
      std::map<std::string, std::int64_t> by_id;
      for (const auto& call : jsonl(sub / out / "calls.jsonl")) {
        const auto t = call["prompt_tokens"].get<std::int64_t>() + call["completion_tokens"].get<std::int64_t>();
        call_sum += t;
        by_id[call["call_id"].get<std::string>()] = t;
      }
      std::int64_t record_sum = 0;
      std::size_t referenced = 0;
      for (const auto& rec : jsonl(sub / out / "records.jsonl")) {
        std::int64_t own = 0;
        for (const auto& id : rec["call_ids"]) {
          own += by_id.at(id.get<std::string>());
          ++referenced;
        }
        c.expect(own == rec["tokens_total"].get<std::int64_t>(), out + ": record tokens differ from its calls");
        record_sum += rec["tokens_total"].get<std::int64_t>();
      }
      c.expect(referenced == by_id.size(), out + ": calls not attributed to exactly one record");
      c.expect(record_sum == call_sum, out + ": record totals differ from calls.jsonl");
      const auto report = nlohmann::json::parse(sot::testing::read_file(sub / out / "report.json"));
      const double avg = report["strategies"][0]["avg_tokens"].get<double>();
      c.expect(std::llround(avg * static_cast<double>(s.n_records)) == call_sum && avg * s.n_records == call_sum,
               out + ": report avg_tokens x records != calls.jsonl sum");
    }
  }
  return c.done(fmt::format("{} fixture runs, report tokens == sum over calls.jsonl", fixtures));
}

Outcome aggregation() {
  Check c;
  const std::vector<double> seeds{1.0, 0.0};
  const auto s = metrics::aggregate_accuracy(seeds);
  c.expect(std::abs(s.mean - 0.5) <= 1e-12, fmt::format("mean {}", s.mean));
  c.expect(std::abs(s.std - 0.70711) <= 1e-5, fmt::format("std {}", s.std));
  const auto rendered = metrics::format_accuracy(0.964, 0.006);
  c.expect(rendered == "96.4±0.6%", "rendered " + rendered);
  return c.done(fmt::format("mean {:.5f}, std {:.5f}, \"{}\"", s.mean, s.std, rendered));
}

Outcome sweep_cardinalities() {
  const auto start = Clock::now();
  TempDir dir;
  prepare(dir, 2);
  Check c;
  auto j = sot::testing::base_config(dir.path(), {{"name", "sot"}, {"beta", 7}, {"mu", 3}});
  j["out_dir"] = (dir / "betti").string();
  const auto betti = cli::execute_sweep(cli::RunConfig::from_json(j, dir.path()), cli::SweepKind::Betti);
  std::set<std::pair<int, int>> grid;
  for (const auto& cell : betti) {
    grid.insert({cell.beta, cell.mu});
    c.expect(cell.summary.n_records == 2, cell.cell + ": wrong record count");
    c.expect(!cell.summary.reports.empty() && cell.summary.reports[0].avg_paths == cell.mu,
             cell.cell + ": avg_paths != mu");
  }
  c.expect(betti.size() == 30 && grid.size() == 30, fmt::format("betti emitted {} cells", betti.size()));
  c.expect(grid.begin()->first == 1 && grid.rbegin()->first == 10 && grid.rbegin()->second == 3, "betti grid range");
  c.expect(sot::testing::read_lines(dir / "betti" / "sweep.csv").size() == 31, "betti sweep.csv rows");

  j["out_dir"] = (dir / "temperature").string();
  const auto temps = cli::execute_sweep(cli::RunConfig::from_json(j, dir.path()), cli::SweepKind::Temperature);
  std::map<std::string, std::set<std::string>> per_strategy;
  for (const auto& cell : temps) {
    per_strategy[cell.strategy].insert(fmt::format("{:.1f}", cell.temperature));
    c.expect(!cell.summary.reports.empty() && cell.summary.reports[0].n_seeds == 5, cell.cell + ": expected 5 seeds");
  }
  c.expect(temps.size() == 22, fmt::format("temperature emitted {} cells", temps.size()));
  c.expect(per_strategy.size() == 2, "temperature sweep should cover two strategies");
  for (const auto& [name, values] : per_strategy) {
    c.expect(values.size() == 11, fmt::format("{}: {} temperature values", name, values.size()));
    c.expect(values.count("0.0") && values.count("1.0"), name + ": range is not 0.0..1.0");
  }
  c.expect(sot::testing::read_lines(dir / "temperature" / "sweep.csv").size() == 23, "temperature sweep.csv rows");
  const double t = seconds_since(start);
  c.expect(t < 120.0, fmt::format("took {:.1f} s (limit 120 s)", t));
  return c.done(fmt::format("betti {} cells, temperature {} cells (11 per strategy) ({:.2f} s)", betti.size(),
                            temps.size(), t));
}

/// Runs only when both SOT_LIVE_SOT_CONFIG and SOT_LIVE_COT_CONFIG name run
/// configs for a remote endpoint; otherwise reported as skipped.
std::optional<Outcome> live_directional() {
  const char* sot_cfg = std::getenv("SOT_LIVE_SOT_CONFIG");
  const char* cot_cfg = std::getenv("SOT_LIVE_COT_CONFIG");
  if (!sot_cfg || !cot_cfg) return std::nullopt;
  const auto sot_run = cli::cmd_run(sot_cfg);
  const auto cot_run = cli::cmd_run(cot_cfg);
  Check c;
  c.expect(sot_run.reports.size() == 1 && cot_run.reports.size() == 1, "each config must yield one strategy");
  if (sot_run.reports.size() != 1 || cot_run.reports.size() != 1) return c.done("");
  const auto& s = sot_run.reports[0];
  const auto& k = cot_run.reports[0];
  const bool ok = s.accuracy_mean >= k.accuracy_mean ||
                  s.accuracy_mean + s.accuracy_std >= k.accuracy_mean - k.accuracy_std;
  c.expect(ok, fmt::format("sot {} below cot {}", metrics::format_accuracy(s.accuracy_mean, s.accuracy_std),
                           metrics::format_accuracy(k.accuracy_mean, k.accuracy_std)));
  return c.done(fmt::format("sot {} vs cot {}", metrics::format_accuracy(s.accuracy_mean, s.accuracy_std),
                            metrics::format_accuracy(k.accuracy_mean, k.accuracy_std)));
}

}  // namespace

int main() {
  ::unsetenv("SOT_BASE_URL");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"path_count_laws", path_count_laws},
      {"call_count_identity", call_count_identity},
      {"sequential_freeness", sequential_freeness},
      {"vote_oracle_equivalence", vote_oracle},
      {"extraction_and_grading_corpora", extraction_and_grading},
      {"determinism", determinism},
      {"warm_cache_replay", replay},
      {"accounting_conservation", accounting_conservation},
      {"aggregation", aggregation},
      {"sweep_cardinalities", sweep_cardinalities},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }

  // Optional live criterion; needs a real endpoint and is not part of CI.
  try {
    if (auto live = live_directional()) {
      if (!live->pass) ++failed;
      std::cout << (live->pass ? "PASS " : "FAIL ") << "live_sot_vs_cot: " << live->detail << std::endl;
    } else {
      std::cout << "SKIP live_sot_vs_cot: manual; set SOT_LIVE_SOT_CONFIG and SOT_LIVE_COT_CONFIG" << std::endl;
    }
  } catch (const std::exception& e) {
    ++failed;
    std::cout << "FAIL live_sot_vs_cot: exception: " << e.what() << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failed))
            << std::endl;
  return failed;
}
