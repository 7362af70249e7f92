#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sot {

enum class ErrorCode {
  InvalidArgument,
  EmptyMessages,
  Transport,
  RateLimited,
  MalformedResponse,
  ScriptExhausted,
  Storage,
  EmptyCondition,
  NoParseableSyzygy,
  Unparseable,
  NotCanonicalizable,
  MissingFile,
  MalformedLine,
  BadGold,
  MixedStrategies,
  UnevenSeedGroups,
  EmptyReport,
  BadConfig,
  MissingRecords,
  MissingTemplate,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `retryable` is only meaningful for
/// Transport and RateLimited failures raised by a transport.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, bool retryable = false)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        retryable_(retryable) {}

  ErrorCode code() const noexcept { return code_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  ErrorCode code_;
  bool retryable_;
};

}  // namespace sot
