#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace camxref::io {

/// Whole-file read; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Replaces the file contents, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

} // namespace camxref::io
