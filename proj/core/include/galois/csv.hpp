#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace galois {

// Parses CSV text into rows of raw string fields. Handles double-quoted
// fields with "" escapes and tolerates CRLF line endings. A trailing
// newline does not produce an empty row. Throws ParseError on an
// unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Quotes the field only when it contains a comma, quote, or newline.
std::string csv_escape(std::string_view field);

std::string read_text_file(const std::string& path);

}  // namespace galois
