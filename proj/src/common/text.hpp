#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pacasm::text {

// Splits on '\n' (dropping '\r'); a trailing newline does not open a new
// line, and the result always holds at least one line.
std::vector<std::string> split_lines(std::string_view s);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Decimal, 0x hex, 0b binary, optional leading '-', or a 'c' character literal.
std::optional<int64_t> parse_integer(std::string_view s);

std::optional<std::string> read_file(const std::string& path);
bool write_file(const std::string& path, std::string_view contents);

}  // namespace pacasm::text
