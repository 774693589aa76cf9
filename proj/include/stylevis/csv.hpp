#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stylevis::csv {

using Row = std::vector<std::string>;

/// Quotes a field when it contains a comma, quote, CR or LF, or has
/// leading/trailing spaces. Embedded quotes are doubled.
std::string escape_field(std::string_view field);

/// One record terminated by '\n'.
std::string format_row(const Row& row);

/// RFC 4180 reader. Accepts LF or CRLF record terminators and quoted fields
/// spanning lines. Throws Error(Parse) on an unterminated quote.
std::vector<Row> parse(std::string_view data);

}  // namespace stylevis::csv
