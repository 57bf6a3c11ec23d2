#pragma once

#include <cstdint>

#include "core/model.hpp"

namespace medroute {

struct TrainConfig {
  double peak_lr = 3e-4;
  int warmup_steps = -1;  // negative: resolved to 10% of total_steps
  int total_steps = 0;    // <= 0: resolved from epochs and dataset size
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  int batch_size = 32;
  int epochs = 10;
  uint64_t seed = 0;
  double dropout_override = -1.0;  // <0 means use ModelConfig's rate

  void validate() const;
};

// Linear warm-up to peak_lr over warmup_steps, then cosine decay to 0 at
// total_steps. Continuous at the warm-up boundary.
double cosine_lr(const TrainConfig& cfg, int step);

struct OptimizerState {
  ModelParams m;  // first moment
  ModelParams v;  // second moment
  int64_t t = 0;

  static OptimizerState init(const ModelConfig& cfg) {
    return {ModelParams::zeros(cfg), ModelParams::zeros(cfg), 0};
  }
};

// One AdamW update with decoupled weight decay. Increments state.t.
void adamw_step(ModelParams& params, const ModelParams& grads,
                OptimizerState& state, const TrainConfig& cfg, double lr);

// Scalar reference form of the same update, used by tests and callers
// that maintain their own tensors.
double adamw_scalar_update(double theta, double grad, double& m, double& v,
                           int64_t t, const TrainConfig& cfg, double lr);

}  // namespace medroute
