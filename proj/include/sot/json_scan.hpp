#pragma once

#include <nlohmann/json.hpp>

#include <string_view>
#include <vector>

namespace sot {

/// Every balanced `{...}` span in free text that parses as a JSON object, in
/// order of appearance. Nested objects inside a parsed object are not
/// reported separately.
std::vector<nlohmann::json> find_json_objects(std::string_view text);

}  // namespace sot
