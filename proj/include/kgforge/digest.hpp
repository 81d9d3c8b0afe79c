#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace kgforge {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::array<std::uint8_t, 20> sha1(std::string_view data);

// 64-bit FNV-1a; stable across platforms, used for deterministic labels.
constexpr std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value, int digits = 16);

}  // namespace kgforge
