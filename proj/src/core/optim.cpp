#include "core/optim.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace medroute {

void TrainConfig::validate() const {
  require(peak_lr > 0.0, ErrorKind::InvalidArgument, "peak_lr must be > 0");
  require(warmup_steps >= 0 && total_steps > warmup_steps,
          ErrorKind::InvalidArgument, "need total_steps > warmup_steps >= 0");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          ErrorKind::InvalidArgument, "betas must be in [0,1)");
  require(eps > 0.0 && weight_decay >= 0.0, ErrorKind::InvalidArgument,
          "eps must be > 0 and weight_decay >= 0");
  require(batch_size >= 1 && epochs >= 1, ErrorKind::InvalidArgument,
          "batch_size and epochs must be >= 1");
}

double cosine_lr(const TrainConfig& cfg, int step) {
  require(step >= 0 && step <= cfg.total_steps, ErrorKind::InvalidArgument,
          "step out of schedule range");
  if (step < cfg.warmup_steps)
    return cfg.peak_lr * double(step) / double(cfg.warmup_steps);
  double progress = double(step - cfg.warmup_steps) /
                    double(cfg.total_steps - cfg.warmup_steps);
  return cfg.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

double adamw_scalar_update(double theta, double grad, double& m, double& v,
                           int64_t t, const TrainConfig& cfg, double lr) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
  double m_hat = m / (1.0 - std::pow(cfg.beta1, double(t)));
  double v_hat = v / (1.0 - std::pow(cfg.beta2, double(t)));
  return theta - lr * m_hat / (std::sqrt(v_hat) + cfg.eps) -
         lr * cfg.weight_decay * theta;
}

void adamw_step(ModelParams& params, const ModelParams& grads,
                OptimizerState& state, const TrainConfig& cfg, double lr) {
  ++state.t;
  auto pt = params.tensors();
  auto gt = grads.tensors();
  auto mt = state.m.tensors();
  auto vt = state.v.tensors();
  for (size_t k = 0; k < pt.size(); ++k) {
    for (size_t i = 0; i < gt[k].size; ++i)
      require(std::isfinite(gt[k].data[i]), ErrorKind::Internal,
              "non-finite gradient in tensor " + gt[k].name);
    for (size_t i = 0; i < pt[k].size; ++i)
      pt[k].data[i] =
          adamw_scalar_update(pt[k].data[i], gt[k].data[i], mt[k].data[i],
                              vt[k].data[i], state.t, cfg, lr);
  }
}

}  // namespace medroute
