#pragma once

#include <string>
#include <string_view>

namespace forumqa::hash {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// Lowercase hex HMAC-SHA256 digest.
std::string hmac_sha256_hex(std::string_view key, std::string_view message);

// SHA-256 of a file's bytes; throws IoError when unreadable.
std::string file_sha256(const std::string& path);

}  // namespace forumqa::hash
