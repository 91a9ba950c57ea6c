#pragma once

#include <string>

namespace smoothnet {

std::string read_file(const std::string& path);

// Writes to a sibling temp file and renames into place, so a failed write
// never leaves a partial file at the target path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace smoothnet
