#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/vocab.hpp"

namespace medroute {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                          Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct ModelConfig {
  int vocab_size = 0;
  int n_classes = 0;
  int max_len = 128;
  int d_model = 64;
  int n_heads = 4;
  int n_layers = 2;
  int d_ff = 128;
  double dropout_rate = 0.0;
  uint64_t seed = 0;

  int d_head() const { return d_model / n_heads; }
  void validate() const;
};

struct LayerParams {
  Mat wq, wk, wv, wo;                  // d_model x d_model
  Vec bq, bk, bv, bo;                  // d_model
  Mat w1;                              // d_model x d_ff
  Vec b1;                              // d_ff
  Mat w2;                              // d_ff x d_model
  Vec b2;                              // d_model
  Vec ln1_scale, ln1_shift;            // d_model
  Vec ln2_scale, ln2_shift;            // d_model
};

// Mutable view used by the optimizer, serialization and gradient checks.
// Enumeration order is part of the checkpoint format.
struct TensorView {
  std::string name;
  double* data;
  size_t size;
};

struct ModelParams {
  Mat token_emb;  // V x d_model
  Mat pos_emb;    // max_len x d_model
  std::vector<LayerParams> layers;
  Mat w_cls;      // d_model x C
  Vec b_cls;      // C

  static ModelParams zeros(const ModelConfig& cfg);

  std::vector<TensorView> tensors();
  std::vector<TensorView> tensors() const;  // views are const in spirit

  // Throws Error{Internal} naming the first non-finite tensor.
  void check_finite(const std::string& context) const;
};

struct Batch {
  std::vector<TokenSequence> seqs;
  std::vector<int> targets;  // empty at inference
};

// Glorot-uniform weights from SplitMix64(cfg.seed), zero biases and
// layer-norm shifts, unit layer-norm scales.
ModelParams init_params(const ModelConfig& cfg);

// Numerically stable softmax of one logit row.
Vec softmax_row(const Vec& logits);

struct LossAndGrad {
  double loss;
  Mat dlogits;  // B x C
};

// Mean cross-entropy in log space; gradient = (softmax - onehot) / B.
LossAndGrad cross_entropy_loss(const Mat& logits,
                               const std::vector<int>& targets);

// Logits for a batch, B x C. Pre-norm residual blocks, bidirectional
// multi-head attention, GELU feed-forward, CLS pooling. Padding positions
// are skipped entirely, which equals masked attention exactly.
Mat forward(const ModelParams& params, const ModelConfig& cfg,
            const Batch& batch, bool training = false,
            uint64_t dropout_seed = 0);

// Forward + mean cross-entropy + analytic backward. Gradients are
// accumulated into `grads` (caller zeroes them). Returns the loss.
double forward_backward(const ModelParams& params, const ModelConfig& cfg,
                        const Batch& batch, ModelParams& grads,
                        bool training = false, uint64_t dropout_seed = 0);

double compute_loss(const ModelParams& params, const ModelConfig& cfg,
                    const Batch& batch);

struct ScoredClass {
  int class_id;
  double probability;
};

// Softmax-ranked top-k classes, ties broken by ascending class id.
std::vector<ScoredClass> predict_topk(const ModelParams& params,
                                      const ModelConfig& cfg,
                                      const TokenSequence& seq, int k);

}  // namespace medroute
