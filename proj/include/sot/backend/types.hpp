#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sot::backend {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

struct Message {
  Role role = Role::User;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  std::int64_t total() const { return prompt_tokens + completion_tokens; }

  TokenUsage& operator+=(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    return *this;
  }
  bool operator==(const TokenUsage&) const = default;
};

struct ChatRequest {
  std::string model;
  std::vector<Message> messages;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;

  /// Throws EmptyMessages or InvalidArgument when a request invariant fails.
  void validate() const;

  /// Content of the last user message, or empty when there is none.
  std::string last_user_message() const;
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  /// Transport attempts consumed; 0 when served from the cache.
  int attempts = 1;
  bool cached = false;
  std::string call_id;
};

nlohmann::json to_json(const ChatRequest& request);

}  // namespace sot::backend
