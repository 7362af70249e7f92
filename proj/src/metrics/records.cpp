#include "sot/run_record.hpp"

#include "sot/error.hpp"

namespace sot {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Cot: return "cot";
    case Strategy::CotSc: return "cot_sc";
    case Strategy::Sot: return "sot";
  }
  return "cot";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "cot") return Strategy::Cot;
  if (name == "cot_sc") return Strategy::CotSc;
  if (name == "sot") return Strategy::Sot;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(PlanSource source) {
  switch (source) {
    case PlanSource::Analysed: return "analysed";
    case PlanSource::Fallback: return "fallback";
    case PlanSource::Forced: return "forced";
  }
  return "fallback";
}

namespace {
PlanSource plan_source_from_string(std::string_view name) {
  if (name == "analysed") return PlanSource::Analysed;
  if (name == "fallback") return PlanSource::Fallback;
  if (name == "forced") return PlanSource::Forced;
  throw Error(ErrorCode::InvalidArgument, "unknown plan source '" + std::string(name) + "'");
}
}  // namespace

ResolutionPlan ResolutionPlan::make(int beta, int mu, PlanSource source, int beta_max, int mu_max) {
  if (beta < 1 || beta > beta_max) throw Error(ErrorCode::InvalidArgument, "beta out of range");
  if (mu < 1 || mu > mu_max) throw Error(ErrorCode::InvalidArgument, "mu out of range");
  return {beta, mu, source};
}

nlohmann::json to_json(const ResolutionPlan& plan) {
  return {{"beta", plan.beta}, {"mu", plan.mu}, {"source", to_string(plan.source)}};
}

ResolutionPlan plan_from_json(const nlohmann::json& j) {
  return {j.at("beta").get<int>(), j.at("mu").get<int>(), plan_source_from_string(j.at("source").get<std::string>())};
}

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j;
  j["problem_id"] = r.problem_id;
  j["strategy"] = to_string(r.strategy);
  j["label"] = r.label;
  j["seed"] = r.seed;
  j["plan"] = r.plan ? to_json(*r.plan) : nlohmann::json(nullptr);
  j["path_count"] = r.path_count;
  j["tokens_total"] = r.tokens_total;
  j["final"] = r.final_answer ? to_json(*r.final_answer) : nlohmann::json(nullptr);
  j["gold"] = r.gold ? to_json(*r.gold) : nlohmann::json(nullptr);
  j["correct"] = r.correct;
  j["failure"] = r.failure ? nlohmann::json{{"stage", r.failure->stage}, {"reason", r.failure->reason}}
                           : nlohmann::json(nullptr);
  j["call_ids"] = r.call_ids;
  j["trace"] = r.trace;
  return j;
}

RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.problem_id = j.at("problem_id").get<std::string>();
  r.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  r.label = j.at("label").get<std::string>();
  r.seed = j.at("seed").get<std::int64_t>();
  if (!j.at("plan").is_null()) r.plan = plan_from_json(j["plan"]);
  r.path_count = j.at("path_count").get<int>();
  r.tokens_total = j.at("tokens_total").get<std::int64_t>();
  if (!j.at("final").is_null()) r.final_answer = answer_from_json(j["final"]);
  if (j.contains("gold") && !j["gold"].is_null()) r.gold = answer_from_json(j["gold"]);
  r.correct = j.at("correct").get<bool>();
  if (!j.at("failure").is_null()) {
    r.failure = Failure{j["failure"].at("stage").get<std::string>(), j["failure"].at("reason").get<std::string>()};
  }
  r.call_ids = j.at("call_ids").get<std::vector<std::string>>();
  r.trace = j.value("trace", nlohmann::json::object());
  if (r.path_count < 1) throw Error(ErrorCode::InvalidArgument, "path_count must be positive");
  if (r.tokens_total < 0) throw Error(ErrorCode::InvalidArgument, "tokens_total must be nonnegative");
  if (r.correct && !r.final_answer) throw Error(ErrorCode::InvalidArgument, "correct record without a final answer");
  return r;
}

}  // namespace sot
