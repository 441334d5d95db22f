#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace stimforge {

/// Writes to a unique temporary file in the same directory, fsyncs it and
/// renames it over `path`, so readers see either the old or the new file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Whole file, or nullopt if it does not exist. Throws io_error otherwise.
std::optional<std::string> read_file(const std::filesystem::path& path);

/// Like read_file but throws not_found for a missing file.
std::string read_file_or_throw(const std::filesystem::path& path);

}  // namespace stimforge
