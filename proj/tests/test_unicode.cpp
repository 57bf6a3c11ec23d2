#include <doctest.h>

#include "core/rng.hpp"
#include "core/unicode.hpp"

using namespace medroute;
using unicode::normalize_text;

TEST_CASE("whitespace runs collapse to single spaces") {
  CHECK(normalize_text("  Болит\t\nголова ") == "Болит голова");
  CHECK(normalize_text("a  b\r\n\tc") == "a b c");
}

TEST_CASE("empty input stays empty") {
  CHECK(normalize_text("") == "");
  CHECK(normalize_text(" \t\n ") == "");
}

TEST_CASE("decomposed Cyrillic short i composes to NFC") {
  // и (U+0438) + combining breve (U+0306) -> й (U+0439)
  std::string decomposed = "\xD0\xB8\xCC\x86";
  std::string precomposed = "\xD0\xB9";
  CHECK(normalize_text(decomposed) == precomposed);
}

TEST_CASE("latin combining accents compose") {
  // e + combining acute -> é
  CHECK(normalize_text("e\xCC\x81") == "\xC3\xA9");
  // already-composed text is untouched
  CHECK(normalize_text("\xC3\xA9") == "\xC3\xA9");
}

TEST_CASE("control characters are stripped, no case folding") {
  CHECK(normalize_text("АД\x01\x02 норма") == "АД норма");
  CHECK(normalize_text("ЛОР") == "ЛОР");  // stays upper-case
}

TEST_CASE("invalid UTF-8 becomes replacement characters") {
  std::string out = normalize_text("ab\xFF\xFE""cd");
  CHECK(out.find("\xEF\xBF\xBD") != std::string::npos);
}

TEST_CASE("normalization is idempotent on random ASCII-with-spaces") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::string s;
    for (int i = 0; i < 40; ++i) {
      uint64_t r = rng.below(40);
      if (r < 8)
        s += ' ';
      else if (r < 10)
        s += '\t';
      else
        s += char('a' + (r % 26));
    }
    std::string once = normalize_text(s);
    CHECK(normalize_text(once) == once);
  }
}

TEST_CASE("hangul composes algorithmically") {
  // HANGUL CHOSEONG KIYEOK + JUNGSEONG A -> GA (U+AC00)
  CHECK(normalize_text("\xE1\x84\x80\xE1\x85\xA1") == "\xEA\xB0\x80");
}
