#pragma once

#include <cstdint>
#include <vector>

#include "core/dataset.hpp"

namespace medroute {

struct SplitPlan {
  enum class Mode { KFold, Holdout };
  Mode mode = Mode::KFold;
  int k = 3;                   // KFold
  double train_fraction = 0.9; // Holdout
  uint64_t seed = 0;
};

// Stratified assignment with the pinned PRNG. KFold: fold id per record,
// each record in exactly one test fold. Holdout: fold 0 = train,
// fold 1 = test, per-class train count = round-half-up of the fraction.
// Classes smaller than k fall back to unstratified round-robin for their
// few records (warning on stderr).
std::vector<int> make_split(const Dataset& ds, const LabelCodec& codec,
                            const SplitPlan& plan);

}  // namespace medroute
