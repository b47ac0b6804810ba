#pragma once

#include <filesystem>
#include <string>

namespace metaweave::fsutil {

std::string read_file(const std::filesystem::path& path);

/// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// 16 hex digits of the FNV-1a 64-bit hash; used for cache file names and
/// report provenance.
std::string fnv1a64_hex(const std::string& text);

} // namespace metaweave::fsutil
