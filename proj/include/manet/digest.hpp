#pragma once

#include <span>
#include <string>
#include <string_view>

#include "manet/types.hpp"

namespace manet {

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

/// Keyed tag H(key || message || key).
Digest keyed_tag(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

std::string to_hex(const Digest& d);
/// Throws std::invalid_argument unless `hex` is 64 hex characters.
Digest digest_from_hex(std::string_view hex);

inline constexpr Digest kZeroDigest{};

} // namespace manet
