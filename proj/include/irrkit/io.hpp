#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace irrkit::io {

// Six significant digits, the precision of every floating-point output.
std::string format_real(double value);

// JSON number rounded like format_real; NaN becomes null, infinities "inf" / "-inf".
nlohmann::json json_real(double value);

// Whole-field decimal parse; accepts subnormal results, rejects NaN,
// infinities, empty input and trailing characters.
std::optional<double> parse_real(std::string_view text);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Minimal CSV: fields separated by commas, optional double quotes with ""
// escaping. No embedded newlines.
std::vector<std::string> split_csv(std::string_view line);
std::string csv_field(std::string_view value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// Reads a list file: one entry per line, '#' comments, surrounding blanks
// trimmed, empty lines skipped.
std::vector<std::string> read_list(const std::string& path);

}  // namespace irrkit::io
