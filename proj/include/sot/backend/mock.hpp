#pragma once

#include "sot/backend/transport.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <optional>
#include <vector>

namespace sot::backend {

enum class MockFault { Transport, RateLimit, Malformed };

struct MockRule {
  /// Substring of the last user message; nullopt matches anything.
  std::optional<std::string> match;
  /// With several responses, rules mode picks one by request digest and
  /// sequence mode emits them in order.
  std::vector<std::string> responses;
  TokenUsage usage;
  int fail_times = 0;
  MockFault fault = MockFault::Transport;
};

enum class MockMode { Rules, Sequence };

struct MockScript {
  MockMode mode = MockMode::Rules;
  std::vector<MockRule> rules;

  static MockScript from_json(const nlohmann::json& j);
  static MockScript load(const std::filesystem::path& path);
};

/// Deterministic scripted transport. Rules mode fires the first matching
/// rule; sequence mode consumes steps strictly in order.
class MockTransport final : public Transport {
 public:
  explicit MockTransport(MockScript script);

  RawCompletion send(const ChatRequest& request) override;
  bool is_remote() const override { return false; }

 private:
  struct Step {
    std::size_t rule;
    std::size_t response;
  };

  void maybe_fail(std::size_t rule_index);

  MockScript script_;
  std::mutex mutex_;
  std::vector<int> fails_left_;
  std::vector<Step> steps_;
  std::size_t cursor_ = 0;
};

}  // namespace sot::backend
