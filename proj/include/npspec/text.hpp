#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace npspec::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Strict parse of the whole token; surrounding whitespace is allowed.
std::optional<double> parse_double(std::string_view token);

/// Accepts a decimal or a fraction `num/den` (e.g. `2/9`).
std::optional<double> parse_rational(std::string_view token);

std::optional<long long> parse_integer(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace npspec::text
