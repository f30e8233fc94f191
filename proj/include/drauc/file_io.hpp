#pragma once

#include <string>

namespace drauc {

/// Writes content to a temporary file in the target directory and renames
/// it into place, so readers never observe a truncated file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace drauc
