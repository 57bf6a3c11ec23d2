#include "core/vocab.hpp"

#include <algorithm>
#include <map>

#include "core/error.hpp"

namespace medroute {

namespace {
const std::vector<std::string> kSpecials = {"<pad>", "<unk>", "<cls>"};
}

std::vector<std::string> split_words(const std::string& normalized_text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < normalized_text.size()) {
    size_t j = normalized_text.find(' ', i);
    if (j == std::string::npos) j = normalized_text.size();
    if (j > i) words.push_back(normalized_text.substr(i, j - i));
    i = j + 1;
  }
  return words;
}

Vocabulary Vocabulary::build(const Dataset& ds, size_t min_freq,
                             size_t max_size) {
  require(!ds.records.empty(), ErrorKind::InvalidArgument,
          "cannot build vocabulary from an empty dataset");
  require(max_size >= kSpecials.size(), ErrorKind::InvalidArgument,
          "max_size must allow the special tokens");
  std::map<std::string, size_t> freq;
  for (const auto& r : ds.records)
    for (const auto& w : split_words(r.question_text)) ++freq[w];

  std::vector<std::pair<std::string, size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary v;
  v.id_to_token_ = kSpecials;
  for (const auto& [tok, n] : ranked) {
    if (n < min_freq) break;
    if (v.id_to_token_.size() >= max_size) break;
    v.id_to_token_.push_back(tok);
  }
  for (size_t i = 0; i < v.id_to_token_.size(); ++i)
    v.token_to_id_[v.id_to_token_[i]] = int(i);
  return v;
}

Vocabulary Vocabulary::from_lines(const std::vector<std::string>& lines) {
  require(lines.size() >= kSpecials.size(), ErrorKind::Schema,
          "vocabulary file too short for special tokens");
  for (size_t i = 0; i < kSpecials.size(); ++i)
    require(lines[i] == kSpecials[i], ErrorKind::Schema,
            "vocabulary line " + std::to_string(i) +
                " is not the expected special token " + kSpecials[i]);
  Vocabulary v;
  v.id_to_token_ = lines;
  for (size_t i = 0; i < lines.size(); ++i) v.token_to_id_[lines[i]] = int(i);
  require(v.token_to_id_.size() == lines.size(), ErrorKind::Schema,
          "duplicate token in vocabulary file");
  return v;
}

std::vector<std::string> Vocabulary::to_lines() const { return id_to_token_; }

int Vocabulary::lookup(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  require(id >= 0 && id < size(), ErrorKind::InvalidArgument,
          "token id out of range: " + std::to_string(id));
  return id_to_token_[size_t(id)];
}

TokenSequence encode_sequence(const Vocabulary& vocab, const std::string& text,
                              int max_len) {
  require(max_len >= 2, ErrorKind::InvalidArgument, "max_len must be >= 2");
  TokenSequence seq;
  seq.ids.assign(size_t(max_len), Vocabulary::kPad);
  seq.mask.assign(size_t(max_len), 0);
  seq.ids[0] = Vocabulary::kCls;
  seq.mask[0] = 1;
  seq.true_length = 1;
  auto words = split_words(text);
  for (size_t i = 0; i < words.size() && seq.true_length < max_len; ++i) {
    seq.ids[size_t(seq.true_length)] = vocab.lookup(words[i]);
    seq.mask[size_t(seq.true_length)] = 1;
    ++seq.true_length;
  }
  return seq;
}

}  // namespace medroute
