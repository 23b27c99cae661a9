#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sspde {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

/// Splits one CSV line on commas (no quoting; none of our schemas need it).
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Reads the header and data rows of a CSV stream, checking the header against `expected`.
std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::vector<std::string>& expected_header);

}  // namespace sspde
