#pragma once

#include "sot/backend/types.hpp"

#include <string>

namespace sot::backend {

struct RawCompletion {
  std::string content;
  TokenUsage usage;
};

/// One attempt at a chat completion, no retries. Failures are reported as
/// sot::Error with code Transport, RateLimited or MalformedResponse.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual RawCompletion send(const ChatRequest& request) = 0;
  /// Whether backoff sleeps are meaningful for this transport.
  virtual bool is_remote() const = 0;
};

}  // namespace sot::backend
