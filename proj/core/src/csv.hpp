#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gradlens::detail {

/// Splits one line of RFC 4180 CSV ("" escapes a quote inside a quoted
/// field). Returns false on an unterminated quote.
bool split_csv_line(std::string_view line, std::vector<std::string>& fields, char delimiter = ',');

/// Quotes a field only when it contains a delimiter, quote or newline.
std::string csv_field(std::string_view text);

/// Splits text into lines, accepting LF or CRLF; a trailing newline does not
/// produce an empty final line.
std::vector<std::string_view> split_lines(std::string_view text);

/// Full-precision decimal that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::string& path);

}  // namespace gradlens::detail
