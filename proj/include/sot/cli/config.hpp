#pragma once

#include "sot/backend/completer.hpp"
#include "sot/datasets/loader.hpp"
#include "sot/pipeline/session.hpp"
#include "sot/pipeline/templates.hpp"
#include "sot/run_record.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sot::cli {

struct BackendConfig {
  enum class Kind { Mock, Remote };
  Kind kind = Kind::Mock;
  std::filesystem::path mock_script;
  std::string base_url;
  int timeout_s = 120;
};

struct StrategyConfig {
  Strategy name = Strategy::Sot;
  int n = 5;
  std::optional<std::pair<int, int>> forced;
  int beta_max = kDefaultBetaMax;
  int mu_max = kDefaultMuMax;
};

struct RunConfig {
  BackendConfig backend;
  std::string model;
  pipeline::Decoding decoding;
  std::map<pipeline::Stage, pipeline::Decoding> stage_decoding;
  StrategyConfig strategy;
  datasets::DatasetSpec dataset;
  std::vector<std::int64_t> seeds;
  int parallelism = 1;
  std::map<pipeline::Stage, std::filesystem::path> templates;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir;
  backend::RetryPolicy retry;

  /// Relative paths are resolved against `base_dir`. SOT_BASE_URL overrides
  /// the remote base_url. Throws BadConfig naming the offending field.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  /// Throws BadConfig naming the violated constraint.
  void validate() const;

  nlohmann::json to_json() const;
};

}  // namespace sot::cli
