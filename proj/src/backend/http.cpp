#include "sot/backend/http.hpp"

#include "sot/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sot::backend {

HttpTransport::HttpTransport(HttpConfig config) : config_(std::move(config)) {
  auto url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::BadConfig, "base_url must include a scheme: '" + config_.base_url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = (path_start == std::string::npos ? std::string{} : url.substr(path_start)) + "/chat/completions";
}

RawCompletion parse_chat_completion(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::MalformedResponse, "body is not JSON");
  try {
    const auto& message = j.at("choices").at(0).at("message");
    RawCompletion out;
    out.content = message.at("content").is_null() ? std::string{} : message.at("content").get<std::string>();
    const auto& usage = j.at("usage");
    out.usage.prompt_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    out.usage.completion_tokens = usage.at("completion_tokens").get<std::int64_t>();
    if (out.usage.prompt_tokens < 0 || out.usage.completion_tokens < 0)
      throw Error(ErrorCode::MalformedResponse, "negative usage");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, e.what());
  }
}

RawCompletion HttpTransport::send(const ChatRequest& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  if (!config_.api_key.empty()) client.set_bearer_token_auth(config_.api_key);

  auto result = client.Post(path_, to_json(request).dump(), "application/json");
  if (!result) {
    throw Error(ErrorCode::Transport, "request to " + origin_ + path_ + " failed: " + httplib::to_string(result.error()),
                true);
  }
  const int status = result->status;
  if (status == 429) throw Error(ErrorCode::RateLimited, "HTTP 429", true);
  if (status == 408 || status >= 500) throw Error(ErrorCode::Transport, "HTTP " + std::to_string(status), true);
  if (status != 200) {
    throw Error(ErrorCode::Transport, "HTTP " + std::to_string(status) + ": " + result->body.substr(0, 300));
  }
  return parse_chat_completion(result->body);
}

}  // namespace sot::backend
