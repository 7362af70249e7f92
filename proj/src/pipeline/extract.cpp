#include "sot/pipeline/extract.hpp"

#include "sot/datasets/canonicalize.hpp"
#include "sot/error.hpp"
#include "sot/json_scan.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

namespace sot::pipeline {
namespace {

using datasets::canonicalize;

std::optional<CanonicalAnswer> try_canonicalize(std::string_view raw, TaskKind kind, std::span<const char> labels) {
  std::string value(raw);
  if (kind == TaskKind::FreeText) {
    while (!value.empty() && (std::isspace(static_cast<unsigned char>(value.back())) || value.back() == '.' ||
                              value.back() == '!'))
      value.pop_back();
  }
  if (value.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
  try {
    return canonicalize(value, kind, labels);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string_view rest_of_line(std::string_view text, std::size_t from) {
  const auto eol = text.find('\n', from);
  return text.substr(from, eol == std::string_view::npos ? std::string_view::npos : eol - from);
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<CanonicalAnswer> from_json_object(std::string_view text, TaskKind kind, std::span<const char> labels) {
  auto objects = find_json_objects(text);
  for (auto it = objects.rbegin(); it != objects.rend(); ++it) {
    if (!it->contains("final_answer")) continue;
    const auto& value = (*it)["final_answer"];
    std::string raw;
    if (value.is_string()) raw = value.get<std::string>();
    else if (value.is_number()) raw = value.dump();
    else continue;
    if (auto answer = try_canonicalize(raw, kind, labels)) return answer;
  }
  return std::nullopt;
}

std::optional<CanonicalAnswer> from_delimiter(std::string_view text, TaskKind kind, std::span<const char> labels) {
  std::vector<std::size_t> hits;
  for (auto pos = text.find("####"); pos != std::string_view::npos; pos = text.find("####", pos + 4)) {
    hits.push_back(pos + 4);
  }
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    auto line = rest_of_line(text, *it);
    while (!line.empty() && line.front() == '#') line.remove_prefix(1);
    if (auto answer = try_canonicalize(line, kind, labels)) return answer;
  }
  return std::nullopt;
}

std::optional<CanonicalAnswer> from_phrase(std::string_view text, TaskKind kind, std::span<const char> labels) {
  const auto lowered = lower(text);
  std::vector<std::size_t> hits;
  for (std::string_view phrase : {"answer is", "answer:"}) {
    for (auto pos = lowered.find(phrase); pos != std::string::npos; pos = lowered.find(phrase, pos + 1)) {
      hits.push_back(pos + phrase.size());
    }
  }
  std::sort(hits.begin(), hits.end());
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    auto line = rest_of_line(text, *it);
    while (!line.empty() && (line.front() == ':' || line.front() == ' ' || line.front() == '*')) line.remove_prefix(1);
    if (auto answer = try_canonicalize(line, kind, labels)) return answer;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Extraction> try_extract_final_answer(std::string_view text, TaskKind kind,
                                                   std::span<const char> labels) {
  if (auto a = from_json_object(text, kind, labels)) return Extraction{*a, ExtractionLayer::JsonObject};
  if (auto a = from_delimiter(text, kind, labels)) return Extraction{*a, ExtractionLayer::Delimiter};
  if (auto a = from_phrase(text, kind, labels)) return Extraction{*a, ExtractionLayer::AnswerPhrase};
  if (kind == TaskKind::Numeric) {
    auto tokens = datasets::scan_numbers(text);
    if (!tokens.empty()) {
      const auto& last = tokens.back();
      return Extraction{CanonicalAnswer::of_number(last.value, last.long_decimal), ExtractionLayer::LastNumber};
    }
  }
  if (kind == TaskKind::MultipleChoice) {
    if (auto label = datasets::find_choice_label(text, labels, true, datasets::LowercaseLabels::Parenthesized)) {
      return Extraction{CanonicalAnswer::of_choice(*label), ExtractionLayer::LastChoiceLabel};
    }
  }
  return std::nullopt;
}

CanonicalAnswer extract_final_answer(std::string_view text, TaskKind kind, std::span<const char> labels) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::Unparseable, "empty completion");
  }
  if (auto e = try_extract_final_answer(text, kind, labels)) return e->answer;
  throw Error(ErrorCode::Unparseable, "no answer found by any extraction layer");
}

}  // namespace sot::pipeline
