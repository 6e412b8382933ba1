#pragma once

#include <map>
#include <string>
#include <string_view>

namespace pdpp {

/// Flat `dotted.key = value` text, one entry per line, `#` starts a comment.
/// Throws ConfigError naming the line on malformed input or repeated keys.
std::map<std::string, std::string> parse_key_values(std::string_view text);

std::string read_text_file(const std::string& path);

}  // namespace pdpp
