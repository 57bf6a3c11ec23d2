#include "core/augment.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace medroute {

std::string shuffle_words(const std::string& text, uint64_t seed) {
  std::vector<std::string> tokens;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ' ')) tokens.push_back(tok);
  SplitMix64 rng(seed);
  rng.shuffle(tokens);
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

Dataset balance_dataset(const Dataset& ds, const AugmentConfig& cfg) {
  require(cfg.target_per_class >= 1, ErrorKind::InvalidArgument,
          "target_per_class must be >= 1");
  LabelCodec codec = LabelCodec::fit(ds);

  // Per class, indices into ds.records in original order.
  std::vector<std::vector<size_t>> by_class(size_t(codec.num_classes()));
  for (size_t i = 0; i < ds.records.size(); ++i)
    by_class[size_t(codec.encode(ds.records[i].specialization))].push_back(i);

  Dataset out;
  out.created_at = ds.created_at;
  out.provenance = "balanced to " + std::to_string(cfg.target_per_class) +
                   " per class, seed " + std::to_string(cfg.seed);

  SplitMix64 pick(cfg.seed);  // subsampling and source selection stream
  uint64_t counter = 1;       // per-synthetic-record seed derivation
  const size_t target = cfg.target_per_class;

  for (int c = 0; c < codec.num_classes(); ++c) {
    const auto& idx = by_class[size_t(c)];
    require(!idx.empty(), ErrorKind::InvalidArgument,
            "empty class: " + codec.decode(c));
    if (idx.size() > target && cfg.downsample_majority) {
      // Uniform subsample without replacement, original order kept.
      std::vector<size_t> pool(idx.size());
      std::iota(pool.begin(), pool.end(), size_t(0));
      pick.shuffle(pool);
      pool.resize(target);
      std::sort(pool.begin(), pool.end());
      for (size_t p : pool) out.records.push_back(ds.records[idx[p]]);
    } else {
      for (size_t i : idx) out.records.push_back(ds.records[i]);
      for (size_t have = idx.size(); have < target; ++have) {
        const QARecord& src = ds.records[idx[size_t(pick.below(idx.size()))]];
        uint64_t rec_seed = cfg.seed ^ counter++;
        out.records.push_back(
            {std::string(kSyntheticUrlPrefix) + std::to_string(counter - 1),
             shuffle_words(src.question_text, rec_seed),
             src.specialization});
      }
    }
  }
  return out;
}

}  // namespace medroute
