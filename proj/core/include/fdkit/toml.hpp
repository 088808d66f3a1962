#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace fdkit::toml {

// Reads the TOML subset used by run configs into a JSON tree: comments,
// [table] and [[array.of.tables]] headers with dotted names, bare/quoted and
// dotted keys, basic and literal strings, integers, floats, booleans,
// (multi-line) arrays and inline tables. Dates and multi-line strings are not
// supported. Throws Error{kConfig} with the offending line.
nlohmann::json parse(std::string_view text);

}  // namespace fdkit::toml
