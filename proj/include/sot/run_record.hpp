#pragma once

#include "sot/answer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sot {

enum class Strategy { Cot, CotSc, Sot };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);

enum class PlanSource { Analysed, Fallback, Forced };

std::string_view to_string(PlanSource source);

inline constexpr int kDefaultBetaMax = 10;
inline constexpr int kDefaultMuMax = 7;
inline constexpr int kFallbackBeta = 7;
inline constexpr int kFallbackMu = 3;

/// Auxiliary-condition count and syzygy count for one problem.
struct ResolutionPlan {
  int beta = kFallbackBeta;
  int mu = kFallbackMu;
  PlanSource source = PlanSource::Fallback;

  /// Throws InvalidArgument unless 1 <= beta <= beta_max and 1 <= mu <= mu_max.
  static ResolutionPlan make(int beta, int mu, PlanSource source, int beta_max = kDefaultBetaMax,
                             int mu_max = kDefaultMuMax);
  static ResolutionPlan fallback() { return {kFallbackBeta, kFallbackMu, PlanSource::Fallback}; }

  bool operator==(const ResolutionPlan&) const = default;
};

struct Failure {
  std::string stage;
  std::string reason;
};

/// Persisted per-problem trace. Everything in the reports is recomputable
/// from a list of these.
struct RunRecord {
  std::string problem_id;
  Strategy strategy = Strategy::Cot;
  /// Strategy with its parameters, e.g. "cot_sc(n=5)"; reports group by it.
  std::string label;
  std::int64_t seed = 0;
  std::optional<ResolutionPlan> plan;
  int path_count = 1;
  std::int64_t tokens_total = 0;
  std::optional<CanonicalAnswer> final_answer;
  std::optional<CanonicalAnswer> gold;
  bool correct = false;
  std::optional<Failure> failure;
  std::vector<std::string> call_ids;
  /// Strategy-specific detail (conditions, syzygies, votes).
  nlohmann::json trace = nlohmann::json::object();
};

nlohmann::json to_json(const ResolutionPlan& plan);
ResolutionPlan plan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);

}  // namespace sot
