#include "sot/pipeline/session.hpp"

namespace sot::pipeline {

const Decoding& LlmSession::decoding_for(Stage stage) const {
  const auto it = stage_decoding.find(stage);
  return it == stage_decoding.end() ? decoding : it->second;
}

backend::ChatResponse LlmSession::complete(Stage stage, std::string_view stage_label,
                                           std::vector<backend::Message> messages,
                                           std::optional<std::int64_t> seed_override) {
  const auto& d = decoding_for(stage);
  backend::ChatRequest request;
  request.model = model;
  request.messages = std::move(messages);
  request.temperature = d.temperature;
  request.top_p = d.top_p;
  request.max_tokens = d.max_tokens;
  request.seed = seed_override ? seed_override : seed;
  return completer.complete(request, policy, stage_label, log);
}

}  // namespace sot::pipeline
