#pragma once

#include "sot/backend/cache.hpp"
#include "sot/backend/call_log.hpp"
#include "sot/backend/transport.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>

namespace sot::backend {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
  /// Full jitter: the actual delay is uniform in [0, nominal]. Ignored for
  /// non-remote transports.
  bool jitter = true;

  /// Nominal delay before retry number `retry` (0-based).
  std::chrono::milliseconds nominal_delay(int retry) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Retry, backoff and caching around a Transport. Every successful call is
/// appended to the caller's CallLog.
class Completer {
 public:
  Completer(std::shared_ptr<Transport> transport, std::optional<ResponseCache> cache = std::nullopt,
            Sleeper sleeper = {});

  ChatResponse complete(const ChatRequest& request, const RetryPolicy& policy, std::string_view stage,
                        CallLog& log);

  /// Number of attempts that reached the transport.
  std::uint64_t transport_calls() const { return transport_calls_.load(); }
  const std::optional<ResponseCache>& cache() const { return cache_; }

 private:
  std::shared_ptr<Transport> transport_;
  std::optional<ResponseCache> cache_;
  Sleeper sleeper_;
  std::atomic<std::uint64_t> transport_calls_{0};
};

}  // namespace sot::backend
