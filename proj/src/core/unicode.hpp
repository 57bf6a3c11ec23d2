#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medroute::unicode {

// Decodes UTF-8 to code points; invalid sequences become U+FFFD.
std::vector<uint32_t> decode_utf8(std::string_view s);

std::string encode_utf8(const std::vector<uint32_t>& cps);

// Canonical composition (NFC) of a code point sequence.
void nfc(std::vector<uint32_t>& cps);

bool is_whitespace(uint32_t cp);
bool is_control(uint32_t cp);

// NFC, whitespace runs collapsed to single spaces, outer whitespace
// trimmed, control characters removed. No case folding.
std::string normalize_text(std::string_view raw);

}  // namespace medroute::unicode
