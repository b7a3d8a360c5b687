#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rmsteg {

/// Shortest round-trip decimal representation (std::to_chars). Reports are
/// assembled from these, so identical runs produce byte-identical files.
std::string format_double(double v);

/// Inverse of format_double; also accepts "inf"/"-inf".
double parse_double(const std::string& s);

/// Splits one CSV line on commas. Fields in this project never contain
/// commas or quotes, so no quoting rules are needed.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a whole text file; raises IoFailure when unreadable.
std::string read_text_file(const std::filesystem::path& path);

/// Writes a whole text file atomically enough for our purposes.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Splits file content into lines, tolerating a missing trailing newline.
std::vector<std::string> split_lines(const std::string& text);

}  // namespace rmsteg
