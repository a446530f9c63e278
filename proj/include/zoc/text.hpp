#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace zoc {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Parses a full decimal (or inf/nan) string; throws InvalidArgument.
double parse_double(std::string_view s);

/// Parses a nonnegative integer; throws InvalidArgument.
std::uint64_t parse_uint(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace zoc
