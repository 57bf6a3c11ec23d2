#pragma once

#include <cstdint>
#include <string>

#include "core/dataset.hpp"

namespace medroute {

struct AugmentConfig {
  uint32_t target_per_class = 1;
  uint64_t seed = 0;
  bool downsample_majority = true;
};

// Permutes the space-separated tokens of a normalized text with
// Fisher-Yates over SplitMix64(seed). Token multiset is preserved.
std::string shuffle_words(const std::string& text, uint64_t seed);

// Brings every class to exactly target_per_class records. Deficit classes
// are filled with shuffled variants of uniformly sampled originals;
// surplus classes are uniformly subsampled unless downsample_majority is
// off. Output order: class (codec order), originals, then synthetics.
Dataset balance_dataset(const Dataset& ds, const AugmentConfig& cfg);

}  // namespace medroute
