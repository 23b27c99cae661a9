#include "sspde/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <system_error>

#include "sspde/common.hpp"

namespace sspde {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw NumericalError("failed to format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("malformed integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::vector<std::string>& expected_header) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV input");
  const auto header = split_csv_line(line);
  if (header.size() != expected_header.size()) throw ValidationError("unexpected CSV header '" + line + "'");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != expected_header[i]) throw ValidationError("unexpected CSV header '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != expected_header.size()) throw ValidationError("CSV row has wrong column count: '" + line + "'");
    rows.emplace_back(fields.begin(), fields.end());
  }
  return rows;
}

}  // namespace sspde
