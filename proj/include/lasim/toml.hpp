#pragma once

#include <string>

#include <json.hpp>

namespace lasim::toml {

// Minimal TOML reader covering the configuration schema: [table] and
// [[array-of-tables]] headers (dotted names allowed), key = value pairs with
// string/integer/float/boolean/single-line-array values, and # comments.
// Produces the same JSON tree the JSON config path consumes.
nlohmann::json parse(const std::string& text);

}  // namespace lasim::toml
