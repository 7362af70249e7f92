#pragma once

#include "sot/answer.hpp"
#include "sot/pipeline/session.hpp"
#include "sot/pipeline/templates.hpp"
#include "sot/run_record.hpp"

#include <span>
#include <vector>

namespace sot::baselines {

struct VoteEntry {
  CanonicalAnswer answer;
  int count = 0;
};

struct VoteTally {
  /// Sorted by canonical answer order.
  std::vector<VoteEntry> entries;
  CanonicalAnswer winner;
};

/// Groups by canonical equality; the winner has the highest count, ties go to
/// the canonically smallest answer. Throws InvalidArgument on empty input.
VoteTally majority_vote(std::span<const CanonicalAnswer> answers);

/// Request seed for sample `index` of a CoT-SC run under run seed `seed`.
std::int64_t sample_seed(std::int64_t seed, int index);

RunRecord run_cot(const Problem& problem, const pipeline::PromptTemplateSet& templates,
                  pipeline::LlmSession& session, std::int64_t seed);

/// n independent samples of the CoT prompt, majority vote over the parseable
/// ones. Throws BadConfig when n > 1 and the CoT temperature is 0.
RunRecord run_cot_sc(const Problem& problem, int n, const pipeline::PromptTemplateSet& templates,
                     pipeline::LlmSession& session, std::int64_t seed);

}  // namespace sot::baselines
