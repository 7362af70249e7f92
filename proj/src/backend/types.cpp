#include "sot/backend/types.hpp"

#include "sot/error.hpp"

namespace sot::backend {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  throw Error(ErrorCode::InvalidArgument, "unknown role '" + std::string(name) + "'");
}

void ChatRequest::validate() const {
  if (messages.empty()) throw Error(ErrorCode::EmptyMessages, "request has no messages");
  if (messages.front().role == Role::Assistant)
    throw Error(ErrorCode::InvalidArgument, "first message must be system or user");
  if (!(temperature >= 0.0 && temperature <= 2.0))
    throw Error(ErrorCode::InvalidArgument, "temperature outside [0, 2]");
  if (!(top_p > 0.0 && top_p <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "top_p outside (0, 1]");
  if (max_tokens <= 0) throw Error(ErrorCode::InvalidArgument, "max_tokens must be positive");
}

std::string ChatRequest::last_user_message() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) return it->content;
  }
  return {};
}

nlohmann::json to_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  nlohmann::json body = {
      {"model", request.model},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

}  // namespace sot::backend
