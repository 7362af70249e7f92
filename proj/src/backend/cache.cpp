#include "sot/backend/cache.hpp"

#include "sot/error.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace sot::backend {
namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "sha256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::atomic<std::uint64_t> tmp_counter{0};

}  // namespace

std::string cache_key(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back(nlohmann::json::array({to_string(m.role), m.content}));
  }
  nlohmann::json canonical = {
      {"model", request.model},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
      {"max_tokens", request.max_tokens},
      {"seed", request.seed ? nlohmann::json(*request.seed) : nlohmann::json(nullptr)},
  };
  return sha256_hex(canonical.dump());
}

ResponseCache::ResponseCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".json");
}

void ResponseCache::put(const std::string& key, const CallRecord& value) const {
  const auto target = path_for(key);
  std::error_code ec;
  std::filesystem::create_directories(target.parent_path(), ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot create " + target.parent_path().string() + ": " + ec.message());

  std::ostringstream tid;
  tid << std::this_thread::get_id();
  auto tmp = target;
  tmp += fmt::format(".tmp.{}.{}.{}", ::getpid(), tid.str(), tmp_counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(value).dump() << '\n';
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::Storage, "cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Storage, "cannot rename into " + target.string());
  }
}

std::optional<CallRecord> ResponseCache::get(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  auto parsed = nlohmann::json::parse(in, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  try {
    return call_record_from_json(parsed);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace sot::backend
