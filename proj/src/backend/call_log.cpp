#include "sot/backend/call_log.hpp"

#include <fmt/format.h>

namespace sot::backend {

nlohmann::json to_json(const CallRecord& r) {
  return {
      {"call_id", r.call_id},
      {"stage", r.stage},
      {"request_digest", r.request_digest},
      {"model", r.model},
      {"temperature", r.temperature},
      {"prompt", r.prompt},
      {"content", r.content},
      {"prompt_tokens", r.prompt_tokens},
      {"completion_tokens", r.completion_tokens},
      {"attempts", r.attempts},
      {"cached", r.cached},
  };
}

CallRecord call_record_from_json(const nlohmann::json& j) {
  CallRecord r;
  r.call_id = j.at("call_id").get<std::string>();
  r.stage = j.at("stage").get<std::string>();
  r.request_digest = j.at("request_digest").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.prompt = j.value("prompt", std::string{});
  r.content = j.at("content").get<std::string>();
  r.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
  r.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
  r.attempts = j.at("attempts").get<int>();
  r.cached = j.at("cached").get<bool>();
  return r;
}

std::string CallLog::next_id() { return fmt::format("{}/{:03}", prefix_, next_seq_++); }

TokenUsage CallLog::total_usage() const {
  TokenUsage total;
  for (const auto& r : records_) total += r.usage();
  return total;
}

}  // namespace sot::backend
