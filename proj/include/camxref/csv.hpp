#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace camxref::csv {

struct Row {
    std::size_t line_number = 0; // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF, embedded newlines.
/// Blank lines are skipped. Throws ValidationError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

} // namespace camxref::csv
