#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skplane::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; a trailing '\r' is stripped.
[[nodiscard]] std::vector<std::string> split_record(std::string_view line);

/// Reads one physical line; returns false at end of stream.
bool read_line(std::istream& in, std::string& line);

/// Decimal rendering with 17 significant digits, which round-trips every
/// finite double exactly.
[[nodiscard]] std::string format_double(double value);

/// Strict parse of a whole field as a finite double.
[[nodiscard]] std::optional<double> parse_double(std::string_view text);

/// Index of `name` in a header record, or nullopt.
[[nodiscard]] std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                                     std::string_view name);

}  // namespace skplane::csv
