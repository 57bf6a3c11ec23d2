#include "core/split.hpp"

#include <cmath>
#include <iostream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace medroute {

std::vector<int> make_split(const Dataset& ds, const LabelCodec& codec,
                            const SplitPlan& plan) {
  const size_t n = ds.records.size();
  if (plan.mode == SplitPlan::Mode::KFold) {
    require(plan.k >= 2, ErrorKind::InvalidArgument, "k must be >= 2");
    require(n >= size_t(plan.k), ErrorKind::InvalidArgument,
            "dataset smaller than k");
  } else {
    require(n >= 2, ErrorKind::InvalidArgument,
            "holdout needs at least 2 records");
    require(plan.train_fraction > 0.0 && plan.train_fraction < 1.0,
            ErrorKind::InvalidArgument, "train_fraction must be in (0,1)");
  }

  std::vector<std::vector<size_t>> by_class(size_t(codec.num_classes()));
  for (size_t i = 0; i < n; ++i)
    by_class[size_t(codec.encode(ds.records[i].specialization))].push_back(i);

  std::vector<int> fold(n, 0);
  SplitMix64 rng(plan.seed);
  for (int c = 0; c < codec.num_classes(); ++c) {
    auto idx = by_class[size_t(c)];
    rng.shuffle(idx);
    if (plan.mode == SplitPlan::Mode::KFold) {
      if (idx.size() < size_t(plan.k))
        std::cerr << "warning: class '" << codec.decode(c) << "' has "
                  << idx.size() << " records, fewer than k=" << plan.k
                  << "; stratification degrades to round-robin\n";
      for (size_t i = 0; i < idx.size(); ++i)
        fold[idx[i]] = int(i % size_t(plan.k));
    } else {
      size_t n_train =
          size_t(std::floor(plan.train_fraction * double(idx.size()) + 0.5));
      for (size_t i = 0; i < idx.size(); ++i)
        fold[idx[i]] = i < n_train ? 0 : 1;
    }
  }
  return fold;
}

}  // namespace medroute
