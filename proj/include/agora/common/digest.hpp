#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agora {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256 of `data`, big-endian. Used to seed deterministic choices.
std::uint64_t sha256_u64(std::string_view data);

}  // namespace agora
