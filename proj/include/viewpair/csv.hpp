#pragma once

// Minimal CSV helpers for the fixed-schema numeric files this project reads
// and writes. Fields never contain commas or quotes.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace viewpair::csv {

std::vector<std::string_view> split(std::string_view line);

// Shortest representation that parses back to the identical double;
// infinities are written as "inf" / "-inf".
std::string format_exact(double value);
std::string format_fixed(double value, int decimals);

// Throws ParseError mentioning `line_no` and `field` on failure.
double parse_double(std::string_view text, std::size_t line_no, std::string_view field);
long long parse_int(std::string_view text, std::size_t line_no, std::string_view field);

std::string location(std::size_t line_no);

}  // namespace viewpair::csv
