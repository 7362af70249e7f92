#include "sot/backend/completer.hpp"

#include "sot/error.hpp"

#include <cmath>
#include <random>
#include <thread>

namespace sot::backend {

std::chrono::milliseconds RetryPolicy::nominal_delay(int retry) const {
  const double ms = static_cast<double>(base_delay.count()) * std::pow(multiplier, retry);
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

Completer::Completer(std::shared_ptr<Transport> transport, std::optional<ResponseCache> cache, Sleeper sleeper)
    : transport_(std::move(transport)), cache_(std::move(cache)), sleeper_(std::move(sleeper)) {
  if (!transport_) throw Error(ErrorCode::InvalidArgument, "completer needs a transport");
  if (!sleeper_) {
    if (transport_->is_remote()) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    else sleeper_ = [](std::chrono::milliseconds) {};
  }
}

ChatResponse Completer::complete(const ChatRequest& request, const RetryPolicy& policy, std::string_view stage,
                                 CallLog& log) {
  request.validate();
  const auto key = cache_key(request);

  CallRecord record;
  record.call_id = log.next_id();
  record.stage = std::string(stage);
  record.request_digest = key;
  record.model = request.model;
  record.temperature = request.temperature;
  record.prompt = request.last_user_message();

  if (cache_) {
    if (auto hit = cache_->get(key)) {
      record.content = hit->content;
      record.prompt_tokens = hit->prompt_tokens;
      record.completion_tokens = hit->completion_tokens;
      record.attempts = 0;
      record.cached = true;
      log.append(record);
      return {record.content, record.usage(), 0, true, record.call_id};
    }
  }

  thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
  const bool use_jitter = policy.jitter && transport_->is_remote();

  for (int attempt = 1;; ++attempt) {
    try {
      transport_calls_.fetch_add(1);
      auto raw = transport_->send(request);
      record.content = std::move(raw.content);
      record.prompt_tokens = raw.usage.prompt_tokens;
      record.completion_tokens = raw.usage.completion_tokens;
      record.attempts = attempt;
      break;
    } catch (const Error& e) {
      const bool transient =
          (e.code() == ErrorCode::Transport || e.code() == ErrorCode::RateLimited) && e.retryable();
      if (!transient || attempt > policy.max_retries) throw;
      auto delay = policy.nominal_delay(attempt - 1);
      if (use_jitter && delay.count() > 0) {
        std::uniform_int_distribution<std::int64_t> dist(0, delay.count());
        delay = std::chrono::milliseconds(dist(jitter_rng));
      }
      sleeper_(delay);
    }
  }

  if (cache_) cache_->put(key, record);
  log.append(record);
  return {record.content, record.usage(), record.attempts, false, record.call_id};
}

}  // namespace sot::backend
