#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace varigen {

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split_tabs(std::string_view s);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");
std::string_view trim(std::string_view s);

// Strict numeric parsing: the whole token must be consumed.
bool parse_long(std::string_view s, long long& out);
bool parse_double(std::string_view s, double& out);

}  // namespace varigen
