#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ske::io {

// Shortest round-trip decimal representation of a double (<= 17 significant
// digits). All machine outputs go through this for byte-stable files.
std::string fmt_double(double x);

std::string fmt_int(long long x);

// Writes content to path atomically (temp file + rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Renders rows as an aligned-column text table. Every row must have the
// same number of cells as header.
std::string text_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

} // namespace ske::io
