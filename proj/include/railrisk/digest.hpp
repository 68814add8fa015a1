#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "railrisk/error.hpp"

namespace railrisk {

/// 64-bit FNV-1a. Used to stamp input-file digests into report headers so a
/// report can be traced back to the exact data it was computed from.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline std::string file_digest_hex(const std::string& path) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(read_bytes(path))));
  return std::string(buf);
}

}  // namespace railrisk
