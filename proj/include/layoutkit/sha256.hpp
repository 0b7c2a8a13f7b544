#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace layoutkit {

// SHA-256 digest as lowercase hex. Used for content-addressed caches and
// run fingerprints; not a security boundary.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);

}  // namespace layoutkit
