#include "core/unicode.hpp"

#include <algorithm>

namespace medroute::unicode {
namespace {

#include "core/unicode_tables.inc"

constexpr uint32_t kReplacement = 0xFFFD;

// Hangul syllable decomposition/composition constants.
constexpr uint32_t SBase = 0xAC00, LBase = 0x1100, VBase = 0x1161,
                   TBase = 0x11A7;
constexpr uint32_t LCount = 19, VCount = 21, TCount = 28,
                   NCount = VCount * TCount, SCount = LCount * NCount;

const DecompEntry* find_decomp(uint32_t cp) {
  auto it = std::lower_bound(std::begin(kDecomp), std::end(kDecomp), cp,
                             [](const DecompEntry& e, uint32_t c) { return e.cp < c; });
  return (it != std::end(kDecomp) && it->cp == cp) ? it : nullptr;
}

uint8_t combining_class(uint32_t cp) {
  auto it = std::lower_bound(std::begin(kCcc), std::end(kCcc), cp,
                             [](const CccEntry& e, uint32_t c) { return e.cp < c; });
  return (it != std::end(kCcc) && it->cp == cp) ? it->ccc : 0;
}

uint32_t compose_pair(uint32_t a, uint32_t b) {
  // Hangul LV / LVT.
  if (a >= LBase && a < LBase + LCount && b >= VBase && b < VBase + VCount)
    return SBase + ((a - LBase) * VCount + (b - VBase)) * TCount;
  if (a >= SBase && a < SBase + SCount && (a - SBase) % TCount == 0 &&
      b > TBase && b < TBase + TCount)
    return a + (b - TBase);
  auto it = std::lower_bound(
      std::begin(kCompose), std::end(kCompose), std::pair<uint32_t, uint32_t>{a, b},
      [](const ComposeEntry& e, const std::pair<uint32_t, uint32_t>& k) {
        return e.first != k.first ? e.first < k.first : e.second < k.second;
      });
  return (it != std::end(kCompose) && it->first == a && it->second == b)
             ? it->composite
             : 0;
}

void decompose_into(uint32_t cp, std::vector<uint32_t>& out) {
  if (cp >= SBase && cp < SBase + SCount) {
    uint32_t s = cp - SBase;
    out.push_back(LBase + s / NCount);
    out.push_back(VBase + (s % NCount) / TCount);
    if (s % TCount) out.push_back(TBase + s % TCount);
    return;
  }
  if (const DecompEntry* e = find_decomp(cp)) {
    decompose_into(e->first, out);
    if (e->second) decompose_into(e->second, out);
    return;
  }
  out.push_back(cp);
}

// Canonical ordering: stable sort of nonzero-ccc runs by combining class.
void canonical_order(std::vector<uint32_t>& cps) {
  size_t i = 0;
  while (i < cps.size()) {
    if (combining_class(cps[i]) == 0) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < cps.size() && combining_class(cps[j]) != 0) ++j;
    std::stable_sort(cps.begin() + long(i), cps.begin() + long(j),
                     [](uint32_t a, uint32_t b) {
                       return combining_class(a) < combining_class(b);
                     });
    i = j;
  }
}

}  // namespace

std::vector<uint32_t> decode_utf8(std::string_view s) {
  std::vector<uint32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = (unsigned char)s[i];
    uint32_t cp = 0;
    size_t n = 0;
    if (c < 0x80) {
      cp = c;
      n = 1;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      n = 2;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      n = 3;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      n = 4;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + n > s.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (size_t k = 1; k < n; ++k) {
      unsigned char cc = (unsigned char)s[i + k];
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) ||
        (n == 2 && cp < 0x80) || (n == 3 && cp < 0x800) ||
        (n == 4 && cp < 0x10000)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += n;
  }
  return out;
}

std::string encode_utf8(const std::vector<uint32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (uint32_t cp : cps) {
    if (cp < 0x80) {
      out.push_back(char(cp));
    } else if (cp < 0x800) {
      out.push_back(char(0xC0 | (cp >> 6)));
      out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(char(0xE0 | (cp >> 12)));
      out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(char(0xF0 | (cp >> 18)));
      out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(char(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

void nfc(std::vector<uint32_t>& cps) {
  std::vector<uint32_t> decomposed;
  decomposed.reserve(cps.size());
  for (uint32_t cp : cps) decompose_into(cp, decomposed);
  canonical_order(decomposed);

  // Canonical composition over the reordered sequence.
  std::vector<uint32_t> out;
  out.reserve(decomposed.size());
  long last_starter = -1;
  int prev_ccc = -1;  // ccc of the last kept char after the starter
  for (uint32_t cp : decomposed) {
    int ccc = combining_class(cp);
    if (last_starter >= 0 && prev_ccc < ccc) {
      if (uint32_t comp = compose_pair(out[size_t(last_starter)], cp)) {
        out[size_t(last_starter)] = comp;
        continue;
      }
    }
    out.push_back(cp);
    if (ccc == 0) {
      last_starter = long(out.size()) - 1;
      prev_ccc = -1;
    } else {
      prev_ccc = ccc;
    }
  }
  cps = std::move(out);
}

bool is_whitespace(uint32_t cp) {
  for (uint32_t w : kWhitespace)
    if (w == cp) return true;
  return false;
}

bool is_control(uint32_t cp) {
  return cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F);
}

std::string normalize_text(std::string_view raw) {
  std::vector<uint32_t> cps = decode_utf8(raw);
  nfc(cps);
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (uint32_t cp : cps) {
    if (is_whitespace(cp)) {
      pending_space = true;
      continue;
    }
    if (is_control(cp)) continue;
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(cp);
  }
  return encode_utf8(out);
}

}  // namespace medroute::unicode
