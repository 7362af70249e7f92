#include "sot/backend/mock.hpp"

#include "sot/backend/cache.hpp"
#include "sot/error.hpp"

#include <fstream>

namespace sot::backend {
namespace {

MockFault fault_from_string(const std::string& name) {
  if (name == "transport") return MockFault::Transport;
  if (name == "rate_limit") return MockFault::RateLimit;
  if (name == "malformed") return MockFault::Malformed;
  throw Error(ErrorCode::BadConfig, "mock script: unknown fault '" + name + "'");
}

TokenUsage usage_from_json(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 2) return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
  if (j.is_object())
    return {j.at("prompt_tokens").get<std::int64_t>(), j.at("completion_tokens").get<std::int64_t>()};
  throw Error(ErrorCode::BadConfig, "mock script: usage must be [prompt, completion] or an object");
}

}  // namespace

MockScript MockScript::from_json(const nlohmann::json& j) {
  MockScript script;
  try {
    const auto mode = j.value("mode", std::string("rules"));
    if (mode == "rules") script.mode = MockMode::Rules;
    else if (mode == "sequence") script.mode = MockMode::Sequence;
    else throw Error(ErrorCode::BadConfig, "mock script: unknown mode '" + mode + "'");

    for (const auto& r : j.at("rules")) {
      MockRule rule;
      if (r.contains("match") && !r["match"].is_null()) {
        auto m = r["match"].get<std::string>();
        if (m != "*") rule.match = std::move(m);
      }
      if (r.contains("responses")) rule.responses = r["responses"].get<std::vector<std::string>>();
      else rule.responses.push_back(r.at("response").get<std::string>());
      if (rule.responses.empty()) throw Error(ErrorCode::BadConfig, "mock script: rule without responses");
      rule.usage = usage_from_json(r.at("usage"));
      if (rule.usage.prompt_tokens < 0 || rule.usage.completion_tokens < 0)
        throw Error(ErrorCode::BadConfig, "mock script: negative usage");
      rule.fail_times = r.value("fail_times", 0);
      if (rule.fail_times < 0) throw Error(ErrorCode::BadConfig, "mock script: negative fail_times");
      if (r.contains("fault")) rule.fault = fault_from_string(r["fault"].get<std::string>());
      script.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("mock script: ") + e.what());
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "mock script " + path.string());
  auto parsed = nlohmann::json::parse(in, nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::BadConfig, "mock script is not valid JSON: " + path.string());
  return from_json(parsed);
}

MockTransport::MockTransport(MockScript script) : script_(std::move(script)) {
  fails_left_.reserve(script_.rules.size());
  for (std::size_t i = 0; i < script_.rules.size(); ++i) {
    fails_left_.push_back(script_.rules[i].fail_times);
    for (std::size_t k = 0; k < script_.rules[i].responses.size(); ++k) steps_.push_back({i, k});
  }
}

void MockTransport::maybe_fail(std::size_t rule_index) {
  if (fails_left_[rule_index] <= 0) return;
  --fails_left_[rule_index];
  switch (script_.rules[rule_index].fault) {
    case MockFault::Transport:
      throw Error(ErrorCode::Transport, "injected transport fault", true);
    case MockFault::RateLimit:
      throw Error(ErrorCode::RateLimited, "injected rate limit", true);
    case MockFault::Malformed:
      throw Error(ErrorCode::MalformedResponse, "injected malformed body");
  }
}

RawCompletion MockTransport::send(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  const auto prompt = request.last_user_message();

  if (script_.mode == MockMode::Sequence) {
    if (cursor_ >= steps_.size()) throw Error(ErrorCode::ScriptExhausted, "sequence script has no steps left");
    const auto step = steps_[cursor_];
    const auto& rule = script_.rules[step.rule];
    if (rule.match && prompt.find(*rule.match) == std::string::npos) {
      throw Error(ErrorCode::ScriptExhausted,
                  "sequence step " + std::to_string(cursor_ + 1) + " expects a prompt containing '" + *rule.match + "'");
    }
    if (step.response == 0) maybe_fail(step.rule);
    ++cursor_;
    return {rule.responses[step.response], rule.usage};
  }

  for (std::size_t i = 0; i < script_.rules.size(); ++i) {
    const auto& rule = script_.rules[i];
    if (rule.match && prompt.find(*rule.match) == std::string::npos) continue;
    maybe_fail(i);
    std::size_t pick = 0;
    if (rule.responses.size() > 1) {
      pick = std::stoull(cache_key(request).substr(0, 12), nullptr, 16) % rule.responses.size();
    }
    return {rule.responses[pick], rule.usage};
  }
  throw Error(ErrorCode::ScriptExhausted, "no mock rule matches the prompt");
}

}  // namespace sot::backend
