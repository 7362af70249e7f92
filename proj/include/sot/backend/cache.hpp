#pragma once

#include "sot/backend/call_log.hpp"
#include "sot/backend/types.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace sot::backend {

/// Hex SHA-256 over (model, messages, temperature, top_p, max_tokens, seed).
std::string cache_key(const ChatRequest& request);

/// Content-addressed response store: one JSON file per key, written via
/// rename so that concurrent writers of one key leave a single whole value.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  /// Throws Storage when the file cannot be written.
  void put(const std::string& key, const CallRecord& value) const;
  std::optional<CallRecord> get(const std::string& key) const;

  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace sot::backend
