#include "sot/json_scan.hpp"

namespace sot {

std::vector<nlohmann::json> find_json_objects(std::string_view text) {
  std::vector<nlohmann::json> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      ++i;
      continue;
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    std::size_t end = std::string_view::npos;
    for (std::size_t j = i; j < text.size(); ++j) {
      char c = text[j];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        end = j;
        break;
      }
    }
    if (end == std::string_view::npos) {
      ++i;
      continue;
    }
    auto parsed = nlohmann::json::parse(text.substr(i, end - i + 1), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      out.push_back(std::move(parsed));
      i = end + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace sot
