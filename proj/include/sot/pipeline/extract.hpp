#pragma once

#include "sot/answer.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace sot::pipeline {

/// Which extraction layer produced an answer.
enum class ExtractionLayer { JsonObject, Delimiter, AnswerPhrase, LastNumber, LastChoiceLabel };

struct Extraction {
  CanonicalAnswer answer;
  ExtractionLayer layer;
};

/// Tries, in order: a JSON object with key "final_answer"; "####" to end of
/// line; "answer is" / "answer:" to end of line; the last number (numeric
/// tasks); the last standalone choice label (choice tasks).
std::optional<Extraction> try_extract_final_answer(std::string_view text, TaskKind kind,
                                                   std::span<const char> labels = {});

/// Throws Unparseable when every layer fails.
CanonicalAnswer extract_final_answer(std::string_view text, TaskKind kind, std::span<const char> labels = {});

}  // namespace sot::pipeline
