#include "sot/datasets/loader.hpp"

#include "sot/datasets/canonicalize.hpp"
#include "sot/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <random>
#include <set>

namespace sot::datasets {
namespace {

Error malformed(std::size_t line, const std::string& reason) {
  return Error(ErrorCode::MalformedLine, "line " + std::to_string(line) + ": " + reason);
}

/// "A) 5", "(B) 6", "C. 7", "D: 8" -> label + text; unlabeled options get
/// positional labels.
Choice parse_option(const std::string& option, std::size_t position) {
  std::size_t i = 0;
  if (i < option.size() && option[i] == '(') ++i;
  if (i + 1 < option.size() && std::isupper(static_cast<unsigned char>(option[i])) &&
      (option[i + 1] == ')' || option[i + 1] == '.' || option[i + 1] == ':')) {
    std::size_t text_start = i + 2;
    while (text_start < option.size() && option[text_start] == ' ') ++text_start;
    return {option[i], option.substr(text_start)};
  }
  return {static_cast<char>('A' + position), option};
}

}  // namespace

DatasetFormat dataset_format_from_string(std::string_view name) {
  if (name == "numeric_jsonl") return DatasetFormat::NumericJsonl;
  if (name == "choice_jsonl") return DatasetFormat::ChoiceJsonl;
  throw Error(ErrorCode::BadConfig, "unknown dataset format '" + std::string(name) + "'");
}

std::string_view to_string(DatasetFormat format) {
  return format == DatasetFormat::NumericJsonl ? "numeric_jsonl" : "choice_jsonl";
}

std::vector<Problem> load_dataset(const DatasetSpec& spec) {
  if (spec.limit && *spec.limit == 0) throw Error(ErrorCode::BadConfig, "dataset limit must be >= 1");
  std::ifstream in(spec.path);
  if (!in) throw Error(ErrorCode::MissingFile, spec.path.string());

  const auto filename = spec.path.filename().string();
  std::vector<Problem> problems;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw malformed(line_no, "not valid JSON");
    if (!j.is_object()) throw malformed(line_no, "record is not an object");
    if (!j.contains("question") || !j["question"].is_string()) throw malformed(line_no, "missing string 'question'");

    Problem p;
    p.id = filename + "#" + std::to_string(line_no);
    p.question = j["question"].get<std::string>();

    if (spec.format == DatasetFormat::NumericJsonl) {
      if (!j.contains("answer") || !j["answer"].is_string()) throw malformed(line_no, "missing string 'answer'");
      const auto answer = j["answer"].get<std::string>();
      const auto marker = answer.rfind("####");
      if (marker == std::string::npos)
        throw Error(ErrorCode::BadGold, "line " + std::to_string(line_no) + ": no '####' in answer");
      p.kind = TaskKind::Numeric;
      try {
        p.gold = canonicalize(answer.substr(marker + 4), TaskKind::Numeric);
      } catch (const Error& e) {
        throw Error(ErrorCode::BadGold, "line " + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      if (!j.contains("options") || !j["options"].is_array() || j["options"].empty())
        throw malformed(line_no, "missing nonempty 'options'");
      if (!j.contains("correct") || !j["correct"].is_string()) throw malformed(line_no, "missing string 'correct'");
      p.kind = TaskKind::MultipleChoice;
      std::set<char> seen;
      for (std::size_t k = 0; k < j["options"].size(); ++k) {
        if (!j["options"][k].is_string()) throw malformed(line_no, "option is not a string");
        auto choice = parse_option(j["options"][k].get<std::string>(), k);
        if (!seen.insert(choice.label).second) throw malformed(line_no, "duplicate option label");
        p.choices.push_back(std::move(choice));
      }
      const auto labels = p.labels();
      try {
        p.gold = canonicalize(j["correct"].get<std::string>(), TaskKind::MultipleChoice, labels);
      } catch (const Error& e) {
        throw Error(ErrorCode::BadGold, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (j.contains("meta") && j["meta"].is_object()) {
      for (const auto& [key, value] : j["meta"].items()) {
        p.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    problems.push_back(std::move(p));
  }

  if (spec.shuffle_seed) {
    std::mt19937_64 rng(*spec.shuffle_seed);
    for (std::size_t i = problems.size(); i > 1; --i) {
      std::swap(problems[i - 1], problems[rng() % i]);
    }
  }
  if (spec.limit && problems.size() > *spec.limit) problems.resize(*spec.limit);
  return problems;
}

}  // namespace sot::datasets
