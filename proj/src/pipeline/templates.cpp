#include "sot/pipeline/templates.hpp"

#include "sot/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace sot::pipeline {
namespace {

#include "default_templates.inc"

constexpr std::string_view kAllSlots[] = {"question",  "metadata", "prior_conditions", "all_conditions",
                                          "syzygy_text", "j",      "k",                "beta",
                                          "mu"};

constexpr std::string_view kAnalyseSlots[] = {"question", "metadata"};
constexpr std::string_view kFreenessSlots[] = {"question", "metadata", "prior_conditions", "j", "beta"};
constexpr std::string_view kResolveSlots[] = {"question", "metadata", "all_conditions", "k", "beta", "mu"};
constexpr std::string_view kScoreSlots[] = {"question", "metadata", "all_conditions", "syzygy_text",
                                            "k",        "beta",     "mu"};
constexpr std::string_view kCotSlots[] = {"question", "metadata"};

bool is_known_slot(std::string_view name) {
  return std::find(std::begin(kAllSlots), std::end(kAllSlots), name) != std::end(kAllSlots);
}

/// Calls visit(literal) / visit_slot(name) over the template body.
template <typename Literal, typename Slot>
void walk(std::string_view body, Literal&& literal, Slot&& slot) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = body.find('}', open + 1);
    if (close == std::string_view::npos) break;
    const auto name = body.substr(open + 1, close - open - 1);
    if (is_known_slot(name)) {
      literal(body.substr(pos, open - pos));
      slot(name);
      pos = close + 1;
    } else {
      literal(body.substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  literal(body.substr(pos));
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Analyse: return "analyse";
    case Stage::Freeness: return "freeness";
    case Stage::Resolve: return "resolve";
    case Stage::Score: return "score";
    case Stage::Cot: return "cot";
  }
  return "analyse";
}

Stage stage_from_string(std::string_view name) {
  for (auto stage : kAllStages) {
    if (to_string(stage) == name) return stage;
  }
  throw Error(ErrorCode::BadConfig, "unknown stage '" + std::string(name) + "'");
}

std::span<const std::string_view> slots_for(Stage stage) {
  switch (stage) {
    case Stage::Analyse: return kAnalyseSlots;
    case Stage::Freeness: return kFreenessSlots;
    case Stage::Resolve: return kResolveSlots;
    case Stage::Score: return kScoreSlots;
    case Stage::Cot: return kCotSlots;
  }
  return {};
}

std::vector<std::string> referenced_slots(std::string_view body) {
  std::vector<std::string> out;
  walk(body, [](std::string_view) {}, [&](std::string_view name) { out.emplace_back(name); });
  return out;
}

PromptTemplateSet PromptTemplateSet::defaults() {
  PromptTemplateSet set;
  set.texts_[Stage::Analyse] = std::string(kDefault_analyse);
  set.texts_[Stage::Freeness] = std::string(kDefault_freeness);
  set.texts_[Stage::Resolve] = std::string(kDefault_resolve);
  set.texts_[Stage::Score] = std::string(kDefault_score);
  set.texts_[Stage::Cot] = std::string(kDefault_cot);
  return set;
}

void PromptTemplateSet::set(Stage stage, std::string text) {
  const auto allowed = slots_for(stage);
  for (const auto& name : referenced_slots(text)) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw Error(ErrorCode::BadConfig,
                  "template for stage " + std::string(to_string(stage)) + " uses unavailable slot {" + name + "}");
    }
  }
  texts_[stage] = std::move(text);
}

PromptTemplateSet PromptTemplateSet::load(const std::map<Stage, std::filesystem::path>& files) {
  auto set = defaults();
  std::string missing;
  for (const auto& [stage, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      missing += (missing.empty() ? "" : ", ") + std::string(to_string(stage)) + " (" + path.string() + ")";
      continue;
    }
    std::ostringstream body;
    body << in.rdbuf();
    set.set(stage, body.str());
  }
  if (!missing.empty()) throw Error(ErrorCode::MissingTemplate, "missing template files for stages: " + missing);
  return set;
}

std::string PromptTemplateSet::render(Stage stage, const Slots& slots) const {
  std::string out;
  walk(
      texts_.at(stage), [&](std::string_view literal) { out += literal; },
      [&](std::string_view name) {
        const auto it = slots.find(name);
        if (it == slots.end()) {
          throw Error(ErrorCode::InvalidArgument, "slot {" + std::string(name) + "} not supplied for stage " +
                                                      std::string(to_string(stage)));
        }
        out += it->second;
      });
  return out;
}

std::string render_question(const Problem& problem) {
  std::string out = problem.question;
  if (problem.kind == TaskKind::MultipleChoice && !problem.choices.empty()) {
    out += "\n\nOptions:";
    for (const auto& c : problem.choices) {
      out += "\n";
      out += c.label;
      out += ") " + c.text;
    }
  }
  return out;
}

std::string render_metadata(const Problem& problem) {
  std::string out = "task_kind: " + std::string(to_string(problem.kind));
  for (const auto& [key, value] : problem.meta) out += "\n" + key + ": " + value;
  return out;
}

}  // namespace sot::pipeline
