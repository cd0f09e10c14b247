// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_HASHING_HPP
#define UNSATCACHE_HASHING_HPP

#include <cstdint>
#include <string_view>

namespace unsatcache {

/// 64-bit FNV-1a over a byte string. Used as the primitive hash for
/// sorts, operator symbols and constant values; fixed so that hashes
/// are identical across runs and platforms.
inline constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// FNV-1a over the 8-byte little-endian encoding of an integer.
inline constexpr std::uint64_t fnv1a64(std::uint64_t value) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Order-sensitive hash mixing: combineHashes(a, b) != combineHashes(b, a)
/// in general. Widened form of the classic hash-combine recipe.
inline constexpr std::uint64_t combineHashes(std::uint64_t h1, std::uint64_t h2) {
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ull + (h1 << 6) + (h1 >> 2));
}

}  // namespace unsatcache

#endif
