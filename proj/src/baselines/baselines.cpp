#include "sot/baselines/baselines.hpp"

#include "sot/datasets/canonicalize.hpp"
#include "sot/error.hpp"
#include "sot/pipeline/extract.hpp"

#include <algorithm>
#include <map>

namespace sot::baselines {
namespace {

using pipeline::Stage;

struct Collected {
  std::vector<std::string> call_ids;
  std::int64_t tokens = 0;
};

Collected collect_since(const backend::CallLog& log, std::size_t first) {
  Collected c;
  const auto& calls = log.records();
  for (std::size_t i = first; i < calls.size(); ++i) {
    c.call_ids.push_back(calls[i].call_id);
    c.tokens += calls[i].usage().total();
  }
  return c;
}

std::string cot_prompt(const Problem& problem, const pipeline::PromptTemplateSet& templates) {
  return templates.render(Stage::Cot, {{"question", pipeline::render_question(problem)},
                                       {"metadata", pipeline::render_metadata(problem)}});
}

}  // namespace

VoteTally majority_vote(std::span<const CanonicalAnswer> answers) {
  if (answers.empty()) throw Error(ErrorCode::InvalidArgument, "majority_vote needs at least one answer");
  std::map<CanonicalAnswer, int> counts;
  for (const auto& a : answers) ++counts[a];

  VoteTally tally;
  const VoteEntry* best = nullptr;
  for (const auto& [answer, count] : counts) tally.entries.push_back({answer, count});
  // Map order is canonical order, so the first maximal entry is the smallest.
  for (const auto& e : tally.entries) {
    if (!best || e.count > best->count) best = &e;
  }
  tally.winner = best->answer;
  return tally;
}

std::int64_t sample_seed(std::int64_t seed, int index) {
  // splitmix64 finaliser, truncated to a positive 31-bit value for endpoints
  // that only accept int32 seeds.
  std::uint64_t z = static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<std::int64_t>(z & 0x7fffffffULL);
}

RunRecord run_cot(const Problem& problem, const pipeline::PromptTemplateSet& templates,
                  pipeline::LlmSession& session, std::int64_t seed) {
  RunRecord rec;
  rec.problem_id = problem.id;
  rec.strategy = Strategy::Cot;
  rec.label = "cot";
  rec.seed = seed;
  rec.gold = problem.gold;
  rec.path_count = 1;

  const auto first = session.log.records().size();
  try {
    auto reply = session.ask(Stage::Cot, cot_prompt(problem, templates));
    const auto labels = problem.labels();
    if (auto e = pipeline::try_extract_final_answer(reply.content, problem.kind, labels)) {
      rec.final_answer = e->answer;
    } else {
      rec.failure = Failure{"extract", "Unparseable: no answer found by any extraction layer"};
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Storage) throw;
    rec.failure = Failure{"cot", e.what()};
  }
  auto collected = collect_since(session.log, first);
  rec.call_ids = std::move(collected.call_ids);
  rec.tokens_total = collected.tokens;
  rec.correct = rec.final_answer && datasets::grade(*rec.final_answer, problem.gold);
  return rec;
}

RunRecord run_cot_sc(const Problem& problem, int n, const pipeline::PromptTemplateSet& templates,
                     pipeline::LlmSession& session, std::int64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cot_sc needs n >= 1");
  if (n > 1 && session.decoding_for(Stage::Cot).temperature <= 0.0) {
    throw Error(ErrorCode::BadConfig, "cot_sc with n > 1 requires temperature > 0");
  }

  RunRecord rec;
  rec.problem_id = problem.id;
  rec.strategy = Strategy::CotSc;
  rec.label = "cot_sc(n=" + std::to_string(n) + ")";
  rec.seed = seed;
  rec.gold = problem.gold;
  rec.path_count = n;

  const auto first = session.log.records().size();
  const auto prompt = cot_prompt(problem, templates);
  const auto labels = problem.labels();
  std::vector<CanonicalAnswer> votes;
  nlohmann::json samples = nlohmann::json::array();
  try {
    for (int i = 1; i <= n; ++i) {
      auto reply = session.complete(Stage::Cot, "cot_sc", {{backend::Role::User, prompt}}, sample_seed(seed, i));
      auto e = pipeline::try_extract_final_answer(reply.content, problem.kind, labels);
      samples.push_back({{"index", i}, {"answer", e ? to_json(e->answer) : nlohmann::json(nullptr)},
                         {"call_id", reply.call_id}});
      if (e) votes.push_back(e->answer);
    }
    if (votes.empty()) {
      rec.failure = Failure{"vote", "Unparseable: no sample produced a parseable answer"};
    } else {
      auto tally = majority_vote(votes);
      rec.final_answer = tally.winner;
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& entry : tally.entries) entries.push_back({{"answer", to_json(entry.answer)}, {"count", entry.count}});
      rec.trace["tally"] = std::move(entries);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Storage) throw;
    rec.failure = Failure{"cot_sc", e.what()};
  }
  rec.trace["samples"] = std::move(samples);

  auto collected = collect_since(session.log, first);
  rec.call_ids = std::move(collected.call_ids);
  rec.tokens_total = collected.tokens;
  rec.correct = rec.final_answer && datasets::grade(*rec.final_answer, problem.gold);
  return rec;
}

}  // namespace sot::baselines
