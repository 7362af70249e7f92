#pragma once

#include "sot/answer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace sot::datasets {

enum class DatasetFormat { NumericJsonl, ChoiceJsonl };

DatasetFormat dataset_format_from_string(std::string_view name);
std::string_view to_string(DatasetFormat format);

struct DatasetSpec {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::NumericJsonl;
  std::optional<std::size_t> limit;
  std::optional<std::uint64_t> shuffle_seed;
};

/// numeric_jsonl: {question, answer} with gold after the last "#### ".
/// choice_jsonl: {question, options, correct}. Ids are "<filename>#<line>".
/// Throws MissingFile, MalformedLine, BadGold.
std::vector<Problem> load_dataset(const DatasetSpec& spec);

}  // namespace sot::datasets
