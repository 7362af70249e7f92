#pragma once

#include "sot/backend/completer.hpp"
#include "sot/pipeline/templates.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sot::pipeline {

struct Decoding {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1024;
};

/// Everything a strategy needs to talk to the model on behalf of one
/// (seed, problem) cell.
struct LlmSession {
  backend::Completer& completer;
  backend::CallLog& log;
  backend::RetryPolicy policy;
  std::string model;
  Decoding decoding;
  std::map<Stage, Decoding> stage_decoding;
  std::optional<std::int64_t> seed;

  const Decoding& decoding_for(Stage stage) const;

  backend::ChatResponse complete(Stage stage, std::string_view stage_label, std::vector<backend::Message> messages,
                                 std::optional<std::int64_t> seed_override = std::nullopt);
  backend::ChatResponse ask(Stage stage, const std::string& prompt) {
    return complete(stage, to_string(stage), {{backend::Role::User, prompt}});
  }
};

}  // namespace sot::pipeline
