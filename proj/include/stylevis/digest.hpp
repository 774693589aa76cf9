#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace stylevis {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// First eight digest bytes, big-endian. Stable across platforms.
std::uint64_t sha256_u64(std::string_view bytes);

}  // namespace stylevis
