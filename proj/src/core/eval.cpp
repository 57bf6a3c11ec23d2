#include "core/eval.hpp"

#include <cmath>

#include "core/error.hpp"

namespace medroute {

namespace {

// Carves a stratified validation slice out of a training subset for
// best-epoch selection; never touches the test portion.
void carve_validation(const Dataset& train_in, uint64_t seed,
                      Dataset& train_out, Dataset& val_out) {
  LabelCodec codec = LabelCodec::fit(train_in);
  SplitPlan plan;
  plan.mode = SplitPlan::Mode::Holdout;
  plan.train_fraction = 0.9;
  plan.seed = seed;
  auto fold = make_split(train_in, codec, plan);
  for (size_t i = 0; i < train_in.records.size(); ++i)
    (fold[i] == 0 ? train_out : val_out).records.push_back(
        train_in.records[i]);
  if (val_out.records.empty())  // degenerate tiny classes
    val_out.records = train_out.records;
}

Checkpoint train_on(const Dataset& train_ds, const VocabSpec& vspec,
                    const LabelCodec& codec, const ModelConfig& mcfg,
                    const TrainConfig& tcfg) {
  Dataset tr, va;
  carve_validation(train_ds, tcfg.seed, tr, va);
  Vocabulary vocab = Vocabulary::build(tr, vspec.min_freq, vspec.max_size);
  ModelConfig mc = mcfg;
  mc.vocab_size = vocab.size();
  mc.n_classes = codec.num_classes();
  return train_model(tr, va, vocab, codec, mc, tcfg);
}

}  // namespace

EvalOutcome evaluate_with_cm(const ModelParams& params,
                             const ModelConfig& cfg, const EncodedData& data,
                             int n_classes) {
  std::vector<int> preds;
  preds.reserve(data.seqs.size());
  for (const auto& s : data.seqs)
    preds.push_back(predict_topk(params, cfg, s, 1)[0].class_id);
  EvalOutcome out;
  out.cm = confusion_matrix(data.targets, preds, n_classes);
  out.report = aggregate_metrics(class_metrics(out.cm), out.cm);
  return out;
}

HoldoutResult holdout_evaluate(const Dataset& ds, const VocabSpec& vspec,
                               const ModelConfig& mcfg,
                               const TrainConfig& tcfg, double train_fraction,
                               bool synthetic_in_test) {
  LabelCodec codec = LabelCodec::fit(ds);
  SplitPlan plan;
  plan.mode = SplitPlan::Mode::Holdout;
  plan.train_fraction = train_fraction;
  plan.seed = tcfg.seed;
  auto fold = make_split(ds, codec, plan);

  Dataset train, test;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    bool to_test = fold[i] == 1;
    if (to_test && !synthetic_in_test && is_synthetic(ds.records[i]))
      to_test = false;
    (to_test ? test : train).records.push_back(ds.records[i]);
  }
  require(!test.records.empty(), ErrorKind::InvalidArgument,
          "holdout test split is empty");

  HoldoutResult result;
  result.checkpoint = train_on(train, vspec, codec, mcfg, tcfg);
  EncodedData enc = encode_dataset(test, result.checkpoint.vocab, codec,
                                   result.checkpoint.model_config.max_len);
  result.outcome =
      evaluate_with_cm(result.checkpoint.params,
                       result.checkpoint.model_config, enc,
                       codec.num_classes());
  return result;
}

KFoldResult kfold_evaluate(const Dataset& ds, const VocabSpec& vspec,
                           const ModelConfig& mcfg, const TrainConfig& tcfg,
                           int k, bool synthetic_in_test) {
  require(k >= 2, ErrorKind::InvalidArgument, "k must be >= 2");
  LabelCodec codec = LabelCodec::fit(ds);
  SplitPlan plan;
  plan.mode = SplitPlan::Mode::KFold;
  plan.k = k;
  plan.seed = tcfg.seed;
  auto fold = make_split(ds, codec, plan);

  KFoldResult result;
  for (int f = 0; f < k; ++f) {
    Dataset train, test;
    for (size_t i = 0; i < ds.records.size(); ++i) {
      bool to_test = fold[i] == f;
      if (to_test && !synthetic_in_test && is_synthetic(ds.records[i]))
        to_test = false;
      (to_test ? test : train).records.push_back(ds.records[i]);
    }
    require(!test.records.empty(), ErrorKind::InvalidArgument,
            "fold " + std::to_string(f) + " test split is empty");
    Checkpoint ckpt = train_on(train, vspec, codec, mcfg, tcfg);
    EncodedData enc =
        encode_dataset(test, ckpt.vocab, codec, ckpt.model_config.max_len);
    result.folds.push_back(evaluate_with_cm(ckpt.params, ckpt.model_config,
                                            enc, codec.num_classes()));
  }

  double mean = 0.0;
  for (const auto& o : result.folds) mean += o.report.macro_f1;
  mean /= double(k);
  double var = 0.0;
  for (const auto& o : result.folds) {
    double d = o.report.macro_f1 - mean;
    var += d * d;
  }
  result.mean_macro_f1 = mean;
  result.std_macro_f1 = std::sqrt(var / double(k));
  return result;
}

}  // namespace medroute
