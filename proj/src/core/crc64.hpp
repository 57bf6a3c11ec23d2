#pragma once

#include <cstddef>
#include <cstdint>

namespace medroute {

// CRC-64/XZ (ECMA-182 polynomial, reflected, init/xorout all-ones).
uint64_t crc64(const void* data, size_t len, uint64_t seed = 0);

}  // namespace medroute
