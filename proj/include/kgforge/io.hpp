#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace kgforge {

// Throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it over `path`, so
// readers never observe a partial file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace kgforge
