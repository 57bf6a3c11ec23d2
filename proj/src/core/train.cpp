#include "core/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace medroute {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::vector<int> predict_all(const ModelParams& params,
                             const ModelConfig& cfg,
                             const std::vector<TokenSequence>& seqs) {
  std::vector<int> preds;
  preds.reserve(seqs.size());
  for (const auto& s : seqs)
    preds.push_back(predict_topk(params, cfg, s, 1)[0].class_id);
  return preds;
}

}  // namespace

EncodedData encode_dataset(const Dataset& ds, const Vocabulary& vocab,
                           const LabelCodec& codec, int max_len) {
  EncodedData out;
  out.seqs.reserve(ds.records.size());
  out.targets.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    out.seqs.push_back(encode_sequence(vocab, r.question_text, max_len));
    out.targets.push_back(codec.encode(r.specialization));
  }
  return out;
}

EvalReport evaluate_model(const ModelParams& params, const ModelConfig& cfg,
                          const EncodedData& data, int n_classes) {
  auto preds = predict_all(params, cfg, data.seqs);
  auto cm = confusion_matrix(data.targets, preds, n_classes);
  return aggregate_metrics(class_metrics(cm), cm);
}

Checkpoint train_model(const Dataset& train_ds, const Dataset& val_ds,
                       const Vocabulary& vocab, const LabelCodec& codec,
                       const ModelConfig& mcfg_in, const TrainConfig& tcfg_in) {
  require(!train_ds.records.empty() && !val_ds.records.empty(),
          ErrorKind::InvalidArgument, "empty train or validation split");

  ModelConfig mcfg = mcfg_in;
  if (tcfg_in.dropout_override >= 0.0)
    mcfg.dropout_rate = tcfg_in.dropout_override;

  TrainConfig tcfg = tcfg_in;
  const size_t n_train = train_ds.records.size();
  const size_t steps_per_epoch =
      (n_train + size_t(tcfg.batch_size) - 1) / size_t(tcfg.batch_size);
  if (tcfg.total_steps <= 0)
    tcfg.total_steps = int(steps_per_epoch) * tcfg.epochs;
  if (tcfg.warmup_steps < 0) tcfg.warmup_steps = tcfg.total_steps / 10;
  tcfg.validate();
  mcfg.validate();

  EncodedData train = encode_dataset(train_ds, vocab, codec, mcfg.max_len);
  EncodedData val = encode_dataset(val_ds, vocab, codec, mcfg.max_len);

  ModelParams params = init_params(mcfg);
  OptimizerState state = OptimizerState::init(mcfg);
  ModelParams grads = ModelParams::zeros(mcfg);

  Checkpoint best;
  best.model_config = mcfg;
  best.train_config = tcfg;
  best.vocab = vocab;
  best.codec = codec;
  double best_f1 = -1.0;
  int step = 0;
  std::vector<EpochMetrics> history;

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::vector<size_t> order(n_train);
    std::iota(order.begin(), order.end(), size_t(0));
    SplitMix64 shuffle_rng(tcfg.seed + kGolden * uint64_t(epoch));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    size_t n_batches = 0;
    double lr = 0.0;
    for (size_t start = 0; start < n_train;
         start += size_t(tcfg.batch_size)) {
      Batch batch;
      size_t end = std::min(n_train, start + size_t(tcfg.batch_size));
      for (size_t i = start; i < end; ++i) {
        batch.seqs.push_back(train.seqs[order[i]]);
        batch.targets.push_back(train.targets[order[i]]);
      }
      ++step;
      lr = cosine_lr(tcfg, std::min(step, tcfg.total_steps));
      for (auto& t : grads.tensors())
        std::fill(t.data, t.data + t.size, 0.0);
      double loss = forward_backward(params, mcfg, batch, grads,
                                     mcfg.dropout_rate > 0.0,
                                     tcfg.seed + kGolden * uint64_t(step));
      require(std::isfinite(loss), ErrorKind::Internal,
              "NaN loss at step " + std::to_string(step));
      adamw_step(params, grads, state, tcfg, lr);
      loss_sum += loss;
      ++n_batches;
    }

    EvalReport report =
        evaluate_model(params, mcfg, val, codec.num_classes());
    EpochMetrics em{epoch, loss_sum / double(n_batches), report.macro_f1, lr};
    history.push_back(em);
    if (report.macro_f1 > best_f1) {
      best_f1 = report.macro_f1;
      best.params = params;
    }
  }

  best.history = history;
  return best;
}

Vec bow_features(const Vocabulary& vocab, const std::string& text) {
  Vec f = Vec::Zero(vocab.size());
  auto words = split_words(text);
  for (const auto& w : words) f(vocab.lookup(w)) += 1.0;
  double total = f.sum();
  if (total > 0.0) f /= total;
  return f;
}

double bow_loss_and_grad(const BowModel& model, const std::vector<Vec>& feats,
                         const std::vector<int>& targets, Mat& dw, Vec& db) {
  const size_t b = feats.size();
  require(b > 0 && targets.size() == b, ErrorKind::InvalidArgument,
          "empty batch or target mismatch");
  double loss = 0.0;
  for (size_t i = 0; i < b; ++i) {
    Vec logits = (feats[i].transpose() * model.w).transpose() + model.b;
    double mx = logits.maxCoeff();
    double lse = mx + std::log((logits.array() - mx).exp().sum());
    loss += (lse - logits(targets[i])) / double(b);
    Vec dlogits = softmax_row(logits) / double(b);
    dlogits(targets[i]) -= 1.0 / double(b);
    dw += feats[i] * dlogits.transpose();
    db += dlogits;
  }
  return loss;
}

BowModel train_baseline_bow(const Dataset& train_ds, const Vocabulary& vocab,
                            const LabelCodec& codec, int epochs, double lr,
                            int batch_size, uint64_t seed) {
  require(epochs >= 1 && lr > 0.0 && batch_size >= 1,
          ErrorKind::InvalidArgument, "bad baseline hyperparameters");
  const size_t n = train_ds.records.size();
  require(n > 0, ErrorKind::InvalidArgument, "empty training split");

  std::vector<Vec> feats;
  std::vector<int> targets;
  feats.reserve(n);
  for (const auto& r : train_ds.records) {
    feats.push_back(bow_features(vocab, r.question_text));
    targets.push_back(codec.encode(r.specialization));
  }

  BowModel model{Mat::Zero(vocab.size(), codec.num_classes()),
                 Vec::Zero(codec.num_classes())};
  Mat dw(model.w.rows(), model.w.cols());
  Vec db(model.b.size());
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));
    SplitMix64 rng(seed + kGolden * uint64_t(epoch));
    rng.shuffle(order);
    for (size_t start = 0; start < n; start += size_t(batch_size)) {
      size_t end = std::min(n, start + size_t(batch_size));
      std::vector<Vec> bf;
      std::vector<int> bt;
      for (size_t i = start; i < end; ++i) {
        bf.push_back(feats[order[i]]);
        bt.push_back(targets[order[i]]);
      }
      dw.setZero();
      db.setZero();
      bow_loss_and_grad(model, bf, bt, dw, db);
      model.w -= lr * dw;
      model.b -= lr * db;
    }
  }
  return model;
}

EvalReport evaluate_bow(const BowModel& model, const Dataset& ds,
                        const Vocabulary& vocab, const LabelCodec& codec) {
  std::vector<int> golds, preds;
  for (const auto& r : ds.records) {
    golds.push_back(codec.encode(r.specialization));
    Vec f = bow_features(vocab, r.question_text);
    Vec logits = (f.transpose() * model.w).transpose() + model.b;
    int arg = 0;
    logits.maxCoeff(&arg);
    preds.push_back(arg);
  }
  auto cm = confusion_matrix(golds, preds, codec.num_classes());
  return aggregate_metrics(class_metrics(cm), cm);
}

GridSearchResult grid_search_batch_size(const ModelConfig& mcfg,
                                        const std::vector<int>& candidates,
                                        const GridSearchSpec& spec) {
  require(!candidates.empty(), ErrorKind::InvalidArgument,
          "no batch size candidates");
  for (int c : candidates)
    require(c >= 1, ErrorKind::InvalidArgument, "candidate must be >= 1");
  mcfg.validate();

  // Artificial dataset: random ids over the vocabulary, fixed seed.
  SplitMix64 rng(spec.seed);
  std::vector<TokenSequence> seqs;
  std::vector<int> targets;
  for (int i = 0; i < spec.n_examples; ++i) {
    TokenSequence s;
    s.ids.assign(size_t(mcfg.max_len), Vocabulary::kPad);
    s.mask.assign(size_t(mcfg.max_len), 0);
    s.ids[0] = Vocabulary::kCls;
    s.mask[0] = 1;
    s.true_length = std::min(mcfg.max_len, spec.text_words + 1);
    for (int p = 1; p < s.true_length; ++p) {
      s.ids[size_t(p)] = int(3 + rng.below(uint64_t(
                                  std::max(1, mcfg.vocab_size - 3))));
      s.mask[size_t(p)] = 1;
    }
    seqs.push_back(std::move(s));
    targets.push_back(int(rng.below(uint64_t(mcfg.n_classes))));
  }

  size_t param_count = 0;
  ModelParams params = init_params(mcfg);
  for (const auto& t : params.tensors()) param_count += t.size;
  ModelParams grads = ModelParams::zeros(mcfg);

  GridSearchResult result;
  double best_rate = -1.0;
  for (int cand : candidates) {
    GridSearchEntry entry;
    entry.batch_size = cand;
    // params + grads + optimizer moments + per-example activations.
    double est_mb =
        (4.0 * double(param_count) +
         double(cand) * double(mcfg.max_len) * double(mcfg.d_model) * 20.0) *
        8.0 / (1024.0 * 1024.0);
    if (est_mb > spec.memory_ceiling_mb) {
      entry.feasible = false;
      result.table.push_back(entry);
      continue;
    }
    auto t0 = std::chrono::steady_clock::now();
    size_t processed = 0, cursor = 0;
    for (int s = 0; s < spec.steps_per_candidate; ++s) {
      Batch batch;
      for (int i = 0; i < cand; ++i) {
        batch.seqs.push_back(seqs[cursor]);
        batch.targets.push_back(targets[cursor]);
        cursor = (cursor + 1) % seqs.size();
      }
      for (auto& t : grads.tensors())
        std::fill(t.data, t.data + t.size, 0.0);
      forward_backward(params, mcfg, batch, grads);
      processed += size_t(cand);
    }
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
    entry.examples_per_second = double(processed) / std::max(dt, 1e-9);
    result.table.push_back(entry);
    if (entry.examples_per_second > best_rate) {
      best_rate = entry.examples_per_second;
      result.chosen_batch_size = cand;
    }
  }
  require(result.chosen_batch_size > 0, ErrorKind::InvalidArgument,
          "every candidate exceeded the memory ceiling");
  return result;
}

}  // namespace medroute
