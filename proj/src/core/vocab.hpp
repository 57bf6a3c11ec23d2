#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/dataset.hpp"

namespace medroute {

// Word-level vocabulary with PAD/UNK/CLS specials at ids 0..2.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;

  // Whitespace-split words of normalized question texts; tokens with
  // frequency >= min_freq ranked by (frequency desc, token asc), truncated
  // to max_size - 3, specials prepended.
  static Vocabulary build(const Dataset& ds, size_t min_freq,
                          size_t max_size);

  // One token per line, line number = id, specials first.
  static Vocabulary from_lines(const std::vector<std::string>& lines);
  std::vector<std::string> to_lines() const;

  int lookup(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  int size() const { return int(id_to_token_.size()); }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Fixed-length encoded input: [CLS] + word ids, truncated/padded.
struct TokenSequence {
  std::vector<int> ids;    // length exactly max_len
  std::vector<int> mask;   // 1 for CLS and real tokens, 0 for padding
  int true_length = 0;
};

TokenSequence encode_sequence(const Vocabulary& vocab, const std::string& text,
                              int max_len = 128);

std::vector<std::string> split_words(const std::string& normalized_text);

}  // namespace medroute
