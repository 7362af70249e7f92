#pragma once

#include "sot/backend/transport.hpp"

#include <chrono>
#include <string>

namespace sot::backend {

struct HttpConfig {
  /// e.g. "https://api.openai.com/v1"; "/chat/completions" is appended.
  std::string base_url;
  std::string api_key;
  std::chrono::seconds timeout{120};
};

/// OpenAI-compatible POST {base_url}/chat/completions.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(HttpConfig config);

  RawCompletion send(const ChatRequest& request) override;
  bool is_remote() const override { return true; }

 private:
  HttpConfig config_;
  std::string origin_;
  std::string path_;
};

/// Decodes a chat-completions response body. Throws MalformedResponse.
RawCompletion parse_chat_completion(const std::string& body);

}  // namespace sot::backend
