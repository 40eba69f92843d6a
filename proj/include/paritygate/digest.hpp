#pragma once

#include <string>
#include <string_view>

namespace paritygate {

// Lowercase hex SHA-1 of raw bytes.
std::string sha1_hex(std::string_view bytes);
// Git's blob id: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_sha1(std::string_view content);

}  // namespace paritygate
