#pragma once

#include <string>

#include <json.hpp>

namespace latchsim {

/// Error with a line number for config diagnostics.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

/// Parses the TOML subset used by scenario files into a JSON tree:
/// [table] and [dotted.table] headers, [[array-of-tables]], key = value with
/// strings, numbers, booleans and flat arrays, # comments. Scenario files can
/// equally be plain JSON; both decode to the same tree.
nlohmann::json parse_toml_lite(const std::string& text);

}  // namespace latchsim
