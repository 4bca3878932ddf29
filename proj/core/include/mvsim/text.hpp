#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mvsim::text {

/// Shortest form that round-trips: 17 significant digits.
std::string format_double(double x);

/// Compact form for labels and column names (6 significant digits).
std::string format_short(double x);

/// Strict parse of a whole token; throws ConfigError naming `what` on failure.
double parse_double(std::string_view s, std::string_view what);
unsigned long long parse_uint(std::string_view s, std::string_view what);

std::string_view trim(std::string_view s) noexcept;

/// Splits on any character in `delims`, dropping empty tokens.
std::vector<std::string_view> split(std::string_view s, std::string_view delims);

}  // namespace mvsim::text
