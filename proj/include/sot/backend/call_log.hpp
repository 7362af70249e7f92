#pragma once

#include "sot/backend/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace sot::backend {

/// One line of calls.jsonl. Also the value format of the response cache.
struct CallRecord {
  std::string call_id;
  std::string stage;
  std::string request_digest;
  std::string model;
  double temperature = 0.0;
  std::string prompt;  // last user message of the request
  std::string content;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int attempts = 1;
  bool cached = false;

  TokenUsage usage() const { return {prompt_tokens, completion_tokens}; }
};

nlohmann::json to_json(const CallRecord& record);
CallRecord call_record_from_json(const nlohmann::json& j);

/// Calls made on behalf of one (seed, problem) cell. Ids are derived from the
/// cell prefix and a running sequence number so they do not depend on
/// scheduling.
class CallLog {
 public:
  explicit CallLog(std::string prefix = "call") : prefix_(std::move(prefix)) {}

  std::string next_id();
  void append(CallRecord record) { records_.push_back(std::move(record)); }

  const std::vector<CallRecord>& records() const { return records_; }
  TokenUsage total_usage() const;

 private:
  std::string prefix_;
  int next_seq_ = 1;
  std::vector<CallRecord> records_;
};

}  // namespace sot::backend
