#include "sot/pipeline/sot.hpp"

#include "sot/datasets/canonicalize.hpp"
#include "sot/error.hpp"
#include "sot/json_scan.hpp"
#include "sot/pipeline/extract.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sot::pipeline {
namespace {

using backend::Message;
using backend::Role;

constexpr std::string_view kPlanReask =
    "Reply with only a JSON object of the form {\"beta\": <integer>, \"mu\": <integer>}.";
constexpr std::string_view kScoreReask = "Reply with a single number from 0 to 100 and nothing else.";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<int> integral(const nlohmann::json& v) {
  if (v.is_number_integer()) return static_cast<int>(std::clamp<std::int64_t>(v.get<std::int64_t>(), -1000, 1000));
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<int>(std::clamp(d, -1000.0, 1000.0));
  }
  if (v.is_string()) {
    const auto s = trim(v.get<std::string>());
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos && s.size() < 6) return std::stoi(s);
  }
  return std::nullopt;
}

Slots base_slots(const Problem& problem) {
  return {{"question", render_question(problem)}, {"metadata", render_metadata(problem)}};
}

std::vector<Message> reask(const std::string& prompt, const std::string& reply, std::string_view follow_up) {
  return {{Role::User, prompt}, {Role::Assistant, reply}, {Role::User, std::string(follow_up)}};
}

}  // namespace

std::optional<std::pair<int, int>> parse_plan(std::string_view reply) {
  for (const auto& obj : find_json_objects(reply)) {
    if (!obj.contains("beta") || !obj.contains("mu")) continue;
    auto beta = integral(obj["beta"]);
    auto mu = integral(obj["mu"]);
    if (beta && mu) return std::pair{*beta, *mu};
  }
  return std::nullopt;
}

std::optional<double> parse_score(std::string_view reply) {
  const auto tokens = datasets::scan_numbers(reply);
  if (tokens.empty()) return std::nullopt;
  const double value = static_cast<double>(tokens.front().value.to_long_double());
  return std::clamp(value, 0.0, kWorstScore);
}

std::string render_conditions(std::span<const AuxCondition> conditions) {
  std::string out;
  for (const auto& c : conditions) {
    if (!out.empty()) out += '\n';
    out += std::to_string(c.index) + ". " + c.text;
  }
  return out;
}

std::string sot_label(const PipelineConfig& cfg) {
  if (cfg.forced) {
    return "sot(beta=" + std::to_string(cfg.forced->first) + ",mu=" + std::to_string(cfg.forced->second) + ")";
  }
  return "sot(auto)";
}

ResolutionPlan analyse(const Problem& problem, const PipelineConfig& cfg, const PromptTemplateSet& templates,
                       LlmSession& session) {
  if (cfg.forced) {
    return ResolutionPlan::make(cfg.forced->first, cfg.forced->second, PlanSource::Forced, cfg.beta_max, cfg.mu_max);
  }
  const auto prompt = templates.render(Stage::Analyse, base_slots(problem));
  auto reply = session.ask(Stage::Analyse, prompt);
  auto parsed = parse_plan(reply.content);
  if (!parsed) {
    reply = session.complete(Stage::Analyse, "analyse_reask", reask(prompt, reply.content, kPlanReask));
    parsed = parse_plan(reply.content);
  }
  if (!parsed) return ResolutionPlan::fallback();
  return {std::clamp(parsed->first, 1, cfg.beta_max), std::clamp(parsed->second, 1, cfg.mu_max),
          PlanSource::Analysed};
}

AuxCondition generate_aux_condition(const Problem& problem, std::span<const AuxCondition> prior, int j, int beta,
                                    const PromptTemplateSet& templates, LlmSession& session) {
  if (j != static_cast<int>(prior.size()) + 1) {
    throw Error(ErrorCode::InvalidArgument, "condition " + std::to_string(j) + " requested after " +
                                                std::to_string(prior.size()) + " prior conditions");
  }
  auto slots = base_slots(problem);
  slots["prior_conditions"] = prior.empty() ? std::string("(none yet)") : render_conditions(prior);
  slots["j"] = std::to_string(j);
  slots["beta"] = std::to_string(beta);
  const auto prompt = templates.render(Stage::Freeness, slots);

  auto reply = session.ask(Stage::Freeness, prompt);
  auto text = trim(reply.content);
  if (text.empty()) {
    const auto follow_up =
        "Your reply was empty. State auxiliary condition " + std::to_string(j) + " in one or two sentences.";
    reply = session.complete(Stage::Freeness, "freeness_reask", reask(prompt, reply.content, follow_up));
    text = trim(reply.content);
  }
  if (text.empty()) throw Error(ErrorCode::EmptyCondition, "condition " + std::to_string(j) + " is blank");
  return {j, std::move(text), reply.call_id};
}

std::vector<AuxCondition> generate_freeness(const Problem& problem, const ResolutionPlan& plan,
                                            const PromptTemplateSet& templates, LlmSession& session) {
  std::vector<AuxCondition> conditions;
  conditions.reserve(plan.beta);
  for (int j = 1; j <= plan.beta; ++j) {
    conditions.push_back(generate_aux_condition(problem, conditions, j, plan.beta, templates, session));
  }
  return conditions;
}

Syzygy resolve(const Problem& problem, std::span<const AuxCondition> conditions, int k, int mu,
               const PromptTemplateSet& templates, LlmSession& session) {
  if (conditions.empty()) throw Error(ErrorCode::InvalidArgument, "resolve needs the auxiliary conditions");
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (conditions[i].index != static_cast<int>(i) + 1)
      throw Error(ErrorCode::InvalidArgument, "condition indices are not contiguous");
  }
  if (k < 1 || k > mu) throw Error(ErrorCode::InvalidArgument, "syzygy index out of range");

  auto slots = base_slots(problem);
  slots["all_conditions"] = render_conditions(conditions);
  slots["k"] = std::to_string(k);
  slots["beta"] = std::to_string(conditions.size());
  slots["mu"] = std::to_string(mu);
  auto reply = session.ask(Stage::Resolve, templates.render(Stage::Resolve, slots));

  Syzygy s;
  s.index = k;
  s.chain_text = std::move(reply.content);
  s.usage = reply.usage;
  s.call_ids.push_back(reply.call_id);
  const auto labels = problem.labels();
  if (auto e = try_extract_final_answer(s.chain_text, problem.kind, labels)) s.extracted = e->answer;
  return s;
}

double score_syzygy(const Problem& problem, std::span<const AuxCondition> conditions, Syzygy& syzygy, int mu,
                    const PromptTemplateSet& templates, LlmSession& session) {
  auto slots = base_slots(problem);
  slots["all_conditions"] = render_conditions(conditions);
  slots["syzygy_text"] = syzygy.chain_text;
  slots["k"] = std::to_string(syzygy.index);
  slots["beta"] = std::to_string(conditions.size());
  slots["mu"] = std::to_string(mu);
  const auto prompt = templates.render(Stage::Score, slots);

  auto reply = session.ask(Stage::Score, prompt);
  syzygy.call_ids.push_back(reply.call_id);
  auto score = parse_score(reply.content);
  if (!score) {
    reply = session.complete(Stage::Score, "score_reask", reask(prompt, reply.content, kScoreReask));
    syzygy.call_ids.push_back(reply.call_id);
    score = parse_score(reply.content);
  }
  syzygy.score = score.value_or(kWorstScore);
  return *syzygy.score;
}

int select_optimal(std::span<const Syzygy> syzygies) {
  const Syzygy* best = nullptr;
  auto key = [](const Syzygy& s) {
    return std::tuple(s.score.value_or(kWorstScore), s.usage.completion_tokens, s.index);
  };
  for (const auto& s : syzygies) {
    if (!s.parseable()) continue;
    if (!best || key(s) < key(*best)) best = &s;
  }
  if (!best) throw Error(ErrorCode::NoParseableSyzygy, "no syzygy produced a parseable answer");
  return best->index;
}

RunRecord run_sot(const Problem& problem, const PipelineConfig& cfg, const PromptTemplateSet& templates,
                  LlmSession& session, std::int64_t seed) {
  RunRecord rec;
  rec.problem_id = problem.id;
  rec.strategy = Strategy::Sot;
  rec.label = sot_label(cfg);
  rec.seed = seed;
  rec.gold = problem.gold;

  const auto first_call = session.log.records().size();
  std::vector<AuxCondition> conditions;
  std::vector<Syzygy> syzygies;
  std::optional<int> chosen;
  std::string stage = "analyse";
  try {
    const auto plan = analyse(problem, cfg, templates, session);
    rec.plan = plan;
    stage = "freeness";
    conditions = generate_freeness(problem, plan, templates, session);
    stage = "resolve";
    for (int k = 1; k <= plan.mu; ++k) syzygies.push_back(resolve(problem, conditions, k, plan.mu, templates, session));
    stage = "score";
    for (auto& s : syzygies) {
      if (s.parseable()) score_syzygy(problem, conditions, s, plan.mu, templates, session);
    }
    stage = "select";
    chosen = select_optimal(syzygies);
    rec.final_answer = syzygies.at(*chosen - 1).extracted;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Storage) throw;
    rec.failure = Failure{stage, e.what()};
  }
  if (!rec.plan) rec.plan = ResolutionPlan::fallback();
  rec.path_count = rec.plan->mu;

  const auto& calls = session.log.records();
  backend::TokenUsage total;
  for (std::size_t i = first_call; i < calls.size(); ++i) {
    total += calls[i].usage();
    rec.call_ids.push_back(calls[i].call_id);
  }
  rec.tokens_total = total.total();
  rec.correct = rec.final_answer && datasets::grade(*rec.final_answer, problem.gold);

  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : conditions) conds.push_back({{"index", c.index}, {"text", c.text}, {"call_id", c.call_id}});
  nlohmann::json syz = nlohmann::json::array();
  for (const auto& s : syzygies) {
    syz.push_back({
        {"index", s.index},
        {"answer", s.extracted ? to_json(*s.extracted) : nlohmann::json(nullptr)},
        {"score", s.score ? nlohmann::json(*s.score) : nlohmann::json(nullptr)},
        {"prompt_tokens", s.usage.prompt_tokens},
        {"completion_tokens", s.usage.completion_tokens},
        {"call_ids", s.call_ids},
        {"chain_text", s.chain_text},
    });
  }
  rec.trace = {{"conditions", std::move(conds)},
               {"syzygies", std::move(syz)},
               {"chosen", chosen ? nlohmann::json(*chosen) : nlohmann::json(nullptr)}};
  return rec;
}

}  // namespace sot::pipeline
