#pragma once

#include <istream>
#include <string>
#include <vector>

namespace climcausal::csv {

// Splits one CSV record. Handles quoted fields with embedded commas and
// doubled quotes; a quoted field may not span lines.
std::vector<std::string> split_record(const std::string& line);

// Reads the next non-empty line, stripping '\r' and a leading UTF-8 BOM on the
// first line. Returns false at end of stream.
bool next_line(std::istream& in, std::string& line, bool& first);

std::string trim(const std::string& s);
std::string lower(std::string s);

// Quotes a field when it contains a comma, quote or whitespace at the edges.
std::string quote(const std::string& field);

}  // namespace climcausal::csv
