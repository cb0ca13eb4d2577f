#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace passby::csv {

// RFC 4180 style parsing: comma separated, double quotes for fields that
// contain commas or quotes, doubled quotes as escapes. Lines starting with
// '#' are skipped (used for metadata in exported histograms).
std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal representation ('.' decimal point, locale-free).
std::string format_double(double value);

// Strict full-token parse; throws format_error naming `context` on failure.
double parse_double(const std::string& text, const std::string& context);

}  // namespace passby::csv
