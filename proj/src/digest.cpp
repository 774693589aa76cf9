#include "stylevis/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace stylevis {
namespace {

std::array<unsigned char, 32> sha256_raw(const void* data, std::size_t size) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data, size, out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

std::string to_hex(const std::array<unsigned char, 32>& raw) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(raw.size() * 2);
  for (unsigned char b : raw) {
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0x0f]);
  }
  return hex;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  return to_hex(sha256_raw(bytes.data(), bytes.size()));
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  return to_hex(sha256_raw(bytes.data(), bytes.size()));
}

std::uint64_t sha256_u64(std::string_view bytes) {
  const auto raw = sha256_raw(bytes.data(), bytes.size());
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | raw[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace stylevis
