#pragma once

#include <string>

namespace socialoam {

/// Writes `content` to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Whole-file read. Throws IoError.
[[nodiscard]] std::string read_file(const std::string& path);

}  // namespace socialoam
