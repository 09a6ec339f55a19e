#include "viewpair/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "viewpair/errors.hpp"

namespace viewpair::csv {

std::vector<std::string_view> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string format_exact(double value) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), end};
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                       std::chars_format::fixed, decimals);
  return {buf.data(), end};
}

std::string location(std::size_t line_no) { return "line " + std::to_string(line_no); }

double parse_double(std::string_view text, std::size_t line_no, std::string_view field) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(location(line_no) + ": field '" + std::string(field) +
                     "' is not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_int(std::string_view text, std::size_t line_no, std::string_view field) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(location(line_no) + ": field '" + std::string(field) +
                     "' is not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace viewpair::csv
