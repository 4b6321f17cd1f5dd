#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xgw {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
// Fixed notation with the given number of decimals.
std::string format_fixed(double value, int decimals);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char delimiter);
std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

// Tab-separated fields: backslash escapes for tab, newline, CR and backslash.
std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);

}  // namespace xgw
