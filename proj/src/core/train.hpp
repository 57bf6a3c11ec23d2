#pragma once

#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/dataset.hpp"
#include "core/metrics.hpp"
#include "core/model.hpp"
#include "core/optim.hpp"
#include "core/vocab.hpp"

namespace medroute {

struct EncodedData {
  std::vector<TokenSequence> seqs;
  std::vector<int> targets;
};

EncodedData encode_dataset(const Dataset& ds, const Vocabulary& vocab,
                           const LabelCodec& codec, int max_len);

// Full training loop: shuffled mini-batches, cosine schedule, AdamW.
// Returns the checkpoint of the best validation-macro-F1 epoch with the
// complete per-epoch metrics history.
Checkpoint train_model(const Dataset& train_ds, const Dataset& val_ds,
                       const Vocabulary& vocab, const LabelCodec& codec,
                       const ModelConfig& mcfg, const TrainConfig& tcfg);

EvalReport evaluate_model(const ModelParams& params, const ModelConfig& cfg,
                          const EncodedData& data, int n_classes);

// Multinomial logistic regression over length-normalized bag-of-words
// counts, trained with mini-batch gradient descent.
struct BowModel {
  Mat w;  // V x C
  Vec b;  // C
};

Vec bow_features(const Vocabulary& vocab, const std::string& text);

// Mean cross-entropy and gradients for one mini-batch of feature vectors.
double bow_loss_and_grad(const BowModel& model, const std::vector<Vec>& feats,
                         const std::vector<int>& targets, Mat& dw, Vec& db);

BowModel train_baseline_bow(const Dataset& train_ds, const Vocabulary& vocab,
                            const LabelCodec& codec, int epochs, double lr,
                            int batch_size, uint64_t seed);

EvalReport evaluate_bow(const BowModel& model, const Dataset& ds,
                        const Vocabulary& vocab, const LabelCodec& codec);

struct GridSearchSpec {
  int n_examples = 256;
  int text_words = 32;
  int steps_per_candidate = 5;
  double memory_ceiling_mb = 4096.0;
  uint64_t seed = 0;
};

struct GridSearchEntry {
  int batch_size = 0;
  double examples_per_second = 0.0;
  bool feasible = true;
};

struct GridSearchResult {
  int chosen_batch_size = 0;
  std::vector<GridSearchEntry> table;
};

// Times forward+backward on an artificial dataset and picks the
// highest-throughput candidate under the memory ceiling.
GridSearchResult grid_search_batch_size(const ModelConfig& mcfg,
                                        const std::vector<int>& candidates,
                                        const GridSearchSpec& spec);

}  // namespace medroute
