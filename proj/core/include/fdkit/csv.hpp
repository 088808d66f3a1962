#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdkit::csv {

// Report outputs use 6 significant digits so reruns diff cleanly.
std::string format_g6(double value);

// Rounds to what format_g6 would print; used before JSON emission.
double round_g6(double value);

// Shortest representation that parses back to the identical double.
std::string format_exact(double value);

std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line);

// Splits on LF, dropping a trailing CR on each line and a leading UTF-8 BOM.
std::vector<std::string_view> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& fields);

}  // namespace fdkit::csv
