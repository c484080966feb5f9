#pragma once
#include <string>
#include <vector>

namespace fplab {

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string fmt_double(double v);

// RFC-4180-ish quoting: fields containing comma, quote or newline are quoted
// with inner quotes doubled.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace fplab
