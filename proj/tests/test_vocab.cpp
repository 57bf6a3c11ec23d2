#include <doctest.h>

#include "core/vocab.hpp"

using namespace medroute;

namespace {

Dataset tiny() {
  Dataset ds;
  ds.records = {
      {"u1", "боль в груди", "A"},
      {"u2", "боль в спине", "B"},
      {"u3", "кашель", "A"},
  };
  return ds;
}

}  // namespace

TEST_CASE("specials occupy ids 0..2") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  CHECK(v.token(Vocabulary::kPad) == "<pad>");
  CHECK(v.token(Vocabulary::kUnk) == "<unk>");
  CHECK(v.token(Vocabulary::kCls) == "<cls>");
}

TEST_CASE("tokens rank by frequency desc then token asc") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  // боль and в both appear twice; боль < в by code point
  CHECK(v.lookup("боль") == 3);
  CHECK(v.lookup("в") == 4);
  CHECK(v.size() == 3 + 5);  // боль в груди спине кашель
}

TEST_CASE("min_freq filters rare tokens") {
  Vocabulary v = Vocabulary::build(tiny(), 2, 100);
  CHECK(v.size() == 5);  // specials + боль + в
  CHECK(v.lookup("кашель") == Vocabulary::kUnk);
}

TEST_CASE("max_size truncates after specials") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 4);
  CHECK(v.size() == 4);
  CHECK(v.lookup("боль") == 3);
  CHECK(v.lookup("в") == Vocabulary::kUnk);
}

TEST_CASE("lookup of unknown token is UNK") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  CHECK(v.lookup("отсутствует") == Vocabulary::kUnk);
}

TEST_CASE("lines round trip preserves ids") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  Vocabulary back = Vocabulary::from_lines(v.to_lines());
  CHECK(back.size() == v.size());
  for (int id = 0; id < v.size(); ++id) {
    CHECK(back.token(id) == v.token(id));
    CHECK(back.lookup(v.token(id)) == id);
  }
}

TEST_CASE("encode_sequence starts with CLS and pads to max_len") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  TokenSequence s = encode_sequence(v, "боль в груди", 8);
  REQUIRE(s.ids.size() == 8);
  REQUIRE(s.mask.size() == 8);
  CHECK(s.ids[0] == Vocabulary::kCls);
  CHECK(s.ids[1] == v.lookup("боль"));
  CHECK(s.ids[2] == v.lookup("в"));
  CHECK(s.ids[3] == v.lookup("груди"));
  CHECK(s.true_length == 4);
  for (int i = 4; i < 8; ++i) {
    CHECK(s.ids[i] == Vocabulary::kPad);
    CHECK(s.mask[i] == 0);
  }
  for (int i = 0; i < 4; ++i) CHECK(s.mask[i] == 1);
}

TEST_CASE("encode_sequence truncates long texts") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  TokenSequence s = encode_sequence(v, "боль в груди в спине кашель боль", 4);
  CHECK(s.true_length == 4);
  CHECK(s.ids[0] == Vocabulary::kCls);
  CHECK(s.ids[3] == v.lookup("груди"));  // words past max_len - 1 dropped
}

TEST_CASE("encode_sequence maps unknown words to UNK") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  TokenSequence s = encode_sequence(v, "новое слово", 6);
  CHECK(s.ids[1] == Vocabulary::kUnk);
  CHECK(s.ids[2] == Vocabulary::kUnk);
  CHECK(s.true_length == 3);
}

TEST_CASE("empty text encodes as lone CLS") {
  Vocabulary v = Vocabulary::build(tiny(), 1, 100);
  TokenSequence s = encode_sequence(v, "", 5);
  CHECK(s.true_length == 1);
  CHECK(s.ids[0] == Vocabulary::kCls);
  CHECK(s.ids[1] == Vocabulary::kPad);
}

TEST_CASE("split_words splits on single spaces") {
  auto w = split_words("боль в груди");
  REQUIRE(w.size() == 3);
  CHECK(w[0] == "боль");
  CHECK(w[2] == "груди");
  CHECK(split_words("").empty());
}
