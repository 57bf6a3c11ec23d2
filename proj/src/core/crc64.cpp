#include "core/crc64.hpp"

#include <array>

namespace medroute {
namespace {

constexpr uint64_t kPoly = 0xC96C5795D7870F42ull;  // reflected ECMA-182

std::array<uint64_t, 256> make_table() {
  std::array<uint64_t, 256> t{};
  for (uint64_t i = 0; i < 256; ++i) {
    uint64_t c = i;
    for (int b = 0; b < 8; ++b) c = (c & 1) ? (c >> 1) ^ kPoly : c >> 1;
    t[size_t(i)] = c;
  }
  return t;
}

const std::array<uint64_t, 256> kTable = make_table();

}  // namespace

uint64_t crc64(const void* data, size_t len, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t c = ~seed;
  for (size_t i = 0; i < len; ++i) c = kTable[(c ^ p[i]) & 0xFF] ^ (c >> 8);
  return ~c;
}

}  // namespace medroute
