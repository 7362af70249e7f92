#pragma once

#include "sot/answer.hpp"
#include "sot/backend/types.hpp"
#include "sot/pipeline/session.hpp"
#include "sot/pipeline/templates.hpp"
#include "sot/run_record.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sot::pipeline {

struct PipelineConfig {
  /// When set, (beta, mu) is used as-is and no analysis call is made.
  std::optional<std::pair<int, int>> forced;
  int beta_max = kDefaultBetaMax;
  int mu_max = kDefaultMuMax;
};

struct AuxCondition {
  int index = 1;
  std::string text;
  std::string call_id;
};

/// One candidate reasoning chain.
struct Syzygy {
  int index = 1;
  std::string chain_text;
  std::optional<CanonicalAnswer> extracted;
  /// Minimality cost in [0, 100], lower is better.
  std::optional<double> score;
  /// Usage of the resolve call.
  backend::TokenUsage usage;
  std::vector<std::string> call_ids;

  bool parseable() const { return extracted.has_value(); }
};

inline constexpr double kWorstScore = 100.0;

/// Forced plan without any call, or one analysis call (plus one re-ask) whose
/// {beta, mu} object is clamped into range; the fallback plan otherwise.
ResolutionPlan analyse(const Problem& problem, const PipelineConfig& cfg, const PromptTemplateSet& templates,
                       LlmSession& session);

/// Requires j == prior.size() + 1. Throws EmptyCondition after one re-ask.
AuxCondition generate_aux_condition(const Problem& problem, std::span<const AuxCondition> prior, int j, int beta,
                                    const PromptTemplateSet& templates, LlmSession& session);

std::vector<AuxCondition> generate_freeness(const Problem& problem, const ResolutionPlan& plan,
                                            const PromptTemplateSet& templates, LlmSession& session);

/// Syzygy k under all conditions; extraction is attempted immediately.
Syzygy resolve(const Problem& problem, std::span<const AuxCondition> conditions, int k, int mu,
               const PromptTemplateSet& templates, LlmSession& session);

/// Minimality cost of one chain; also stored into `syzygy.score`. A reply
/// without a number after one re-ask scores kWorstScore.
double score_syzygy(const Problem& problem, std::span<const AuxCondition> conditions, Syzygy& syzygy, int mu,
                    const PromptTemplateSet& templates, LlmSession& session);

/// 1-based index of the parseable syzygy with the lowest score; ties go to
/// fewer completion tokens, then the lower index. Throws NoParseableSyzygy.
int select_optimal(std::span<const Syzygy> syzygies);

/// The whole pipeline for one problem. Failures are recorded, not thrown.
RunRecord run_sot(const Problem& problem, const PipelineConfig& cfg, const PromptTemplateSet& templates,
                  LlmSession& session, std::int64_t seed);

std::string sot_label(const PipelineConfig& cfg);
std::string render_conditions(std::span<const AuxCondition> conditions);

/// Parses the first number in a score reply, clamped to [0, 100].
std::optional<double> parse_score(std::string_view reply);
/// First JSON object in the reply with integer-valued "beta" and "mu".
std::optional<std::pair<int, int>> parse_plan(std::string_view reply);

}  // namespace sot::pipeline
