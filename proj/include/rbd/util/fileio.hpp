#pragma once

#include <filesystem>
#include <string>

namespace rbd {

/// Write `content` to `path` via a temp file + atomic rename, so partial
/// outputs are never left in place. Paths ending in ".gz" are gzip-compressed
/// (with a fixed header so identical content yields identical bytes).
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Read a whole file; transparently inflates gzip input.
std::string read_file(const std::filesystem::path& path);

bool is_gzip_path(const std::filesystem::path& path);

}  // namespace rbd
