#pragma once

#include "sot/answer.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace sot::pipeline {

enum class Stage { Analyse, Freeness, Resolve, Score, Cot };

inline constexpr std::array<Stage, 5> kAllStages = {Stage::Analyse, Stage::Freeness, Stage::Resolve, Stage::Score,
                                                    Stage::Cot};

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

using Slots = std::map<std::string, std::string, std::less<>>;

/// Plain-text prompt templates with `{slot}` placeholders. Only the known
/// slot names are placeholders; any other brace text is literal.
class PromptTemplateSet {
 public:
  /// Built-in wording for every stage.
  static PromptTemplateSet defaults();

  /// Defaults overridden by the given files. Throws MissingTemplate naming
  /// every stage whose file is missing, BadConfig for a template that uses a
  /// slot its stage does not provide.
  static PromptTemplateSet load(const std::map<Stage, std::filesystem::path>& files);

  const std::string& text(Stage stage) const { return texts_.at(stage); }
  void set(Stage stage, std::string text);

  /// Throws InvalidArgument when a referenced slot is missing from `slots`.
  std::string render(Stage stage, const Slots& slots) const;

 private:
  std::map<Stage, std::string> texts_;
};

/// Slot names a template may reference at each stage.
std::span<const std::string_view> slots_for(Stage stage);

/// Slot names referenced by a template body.
std::vector<std::string> referenced_slots(std::string_view body);

std::string render_question(const Problem& problem);
std::string render_metadata(const Problem& problem);

}  // namespace sot::pipeline
