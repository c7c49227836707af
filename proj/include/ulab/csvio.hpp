#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ulab {

// RFC-4180 emission: fields containing a comma, a double quote, CR, or LF
// are quoted, embedded quotes doubled; records end in CRLF.  Content passes
// through as UTF-8 bytes.
std::string csv_escape(const std::string& field);
void csv_write_row(std::ostream& os, const std::vector<std::string>& fields);

// Strict reader for the same dialect (used by round-trip tests and the
// append-skip logic): accepts CRLF or bare LF record ends, rejects stray
// quotes inside unquoted fields and unterminated quoted fields.
std::vector<std::vector<std::string>> csv_parse(const std::string& text);

}  // namespace ulab
