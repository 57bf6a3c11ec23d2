#pragma once

#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/dataset.hpp"
#include "core/metrics.hpp"
#include "core/split.hpp"
#include "core/train.hpp"

namespace medroute {

struct VocabSpec {
  size_t min_freq = 1;
  size_t max_size = 20000;
};

struct EvalOutcome {
  EvalReport report;
  ConfusionMatrix cm;
};

EvalOutcome evaluate_with_cm(const ModelParams& params,
                             const ModelConfig& cfg, const EncodedData& data,
                             int n_classes);

struct HoldoutResult {
  EvalOutcome outcome;
  Checkpoint checkpoint;
};

// 90/10-style holdout: stratified split, vocabulary built from the train
// portion only, a 10% slice of the train portion held out for best-epoch
// selection. Synthetic records assigned to the test side are moved into
// training unless synthetic_in_test is set.
HoldoutResult holdout_evaluate(const Dataset& ds, const VocabSpec& vspec,
                               const ModelConfig& mcfg,
                               const TrainConfig& tcfg, double train_fraction,
                               bool synthetic_in_test = false);

struct KFoldResult {
  std::vector<EvalOutcome> folds;
  double mean_macro_f1 = 0.0;
  double std_macro_f1 = 0.0;
};

KFoldResult kfold_evaluate(const Dataset& ds, const VocabSpec& vspec,
                           const ModelConfig& mcfg, const TrainConfig& tcfg,
                           int k = 3, bool synthetic_in_test = false);

}  // namespace medroute
