#pragma once

// Reader for the subset of TOML used by experiment configs: [tables],
// [[arrays of tables]], dotted keys, basic and literal strings, integers,
// floats (including inf/nan), booleans, arrays (may span lines) and
// single-line inline tables. Dates and multi-line strings are rejected.

#include <json.hpp>
#include <string_view>

namespace rbessel::io {

// Throws ParseError carrying the 1-based line number.
nlohmann::json parse_toml(std::string_view text);

}  // namespace rbessel::io
