#pragma once

#include <string>

namespace biphoton {

// Hex-encoded SHA-256 digests for run manifests.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

}  // namespace biphoton
