#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/optim.hpp"

using namespace medroute;

namespace {

TrainConfig sched_config(int warmup, int total) {
  TrainConfig cfg;
  cfg.peak_lr = 1e-3;
  cfg.warmup_steps = warmup;
  cfg.total_steps = total;
  return cfg;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.vocab_size = 10;
  cfg.n_classes = 2;
  cfg.max_len = 4;
  cfg.d_model = 4;
  cfg.n_heads = 2;
  cfg.n_layers = 1;
  cfg.d_ff = 8;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("train config validation") {
  TrainConfig cfg = sched_config(10, 100);
  CHECK_NOTHROW(cfg.validate());
  cfg.peak_lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = sched_config(100, 100);  // warmup not below total
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = sched_config(10, 100);
  cfg.beta2 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = sched_config(10, 100);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("cosine schedule golden points") {
  TrainConfig cfg = sched_config(10, 110);
  CHECK(cosine_lr(cfg, 0) == 0.0);
  CHECK(cosine_lr(cfg, 5) == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK(cosine_lr(cfg, 10) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(cosine_lr(cfg, 60) == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK(cosine_lr(cfg, 110) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_lr(cfg, -1), Error);
  CHECK_THROWS_AS(cosine_lr(cfg, 111), Error);
}

TEST_CASE("schedule is monotone up then down") {
  TrainConfig cfg = sched_config(10, 110);
  for (int s = 1; s <= 10; ++s)
    CHECK(cosine_lr(cfg, s) > cosine_lr(cfg, s - 1));
  for (int s = 11; s <= 110; ++s)
    CHECK(cosine_lr(cfg, s) < cosine_lr(cfg, s - 1));
}

TEST_CASE("adamw scalar step golden value") {
  TrainConfig cfg;  // defaults: betas 0.9/0.999, eps 1e-8, decay 0.01
  double m = 0.0, v = 0.0;
  double theta = adamw_scalar_update(1.0, 0.5, m, v, 1, cfg, 0.1);
  CHECK(theta == doctest::Approx(0.899000002).epsilon(1e-9));
  CHECK(m == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(v == doctest::Approx(0.00025).epsilon(1e-15));
}

TEST_CASE("weight decay is decoupled from the gradient") {
  TrainConfig cfg;
  cfg.weight_decay = 0.5;
  double m = 0.0, v = 0.0;
  // zero gradient: the only movement is the decay term
  double theta = adamw_scalar_update(2.0, 0.0, m, v, 1, cfg, 0.1);
  CHECK(theta == doctest::Approx(2.0 - 0.1 * 0.5 * 2.0).epsilon(1e-12));
}

TEST_CASE("tensor step matches the scalar reference elementwise") {
  ModelConfig mc = tiny_config();
  TrainConfig tc = sched_config(1, 10);
  ModelParams params = init_params(mc);
  ModelParams reference = params;  // copy before updates
  ModelParams grads = ModelParams::zeros(mc);
  for (auto& t : grads.tensors())
    for (size_t i = 0; i < t.size; ++i) t.data[i] = 0.01 * double(i % 7) - 0.02;

  OptimizerState state = OptimizerState::init(mc);
  adamw_step(params, grads, state, tc, 0.05);
  adamw_step(params, grads, state, tc, 0.05);
  CHECK(state.t == 2);

  auto rt = reference.tensors();
  auto gt = grads.tensors();
  auto pt = params.tensors();
  for (size_t k = 0; k < rt.size(); ++k) {
    for (size_t i = 0; i < rt[k].size; ++i) {
      double m = 0.0, v = 0.0;
      double th = adamw_scalar_update(rt[k].data[i], gt[k].data[i], m, v, 1,
                                      tc, 0.05);
      th = adamw_scalar_update(th, gt[k].data[i], m, v, 2, tc, 0.05);
      CHECK(pt[k].data[i] == doctest::Approx(th).epsilon(1e-14));
    }
  }
}

TEST_CASE("non-finite gradients are rejected with the tensor named") {
  ModelConfig mc = tiny_config();
  TrainConfig tc = sched_config(1, 10);
  ModelParams params = init_params(mc);
  ModelParams grads = ModelParams::zeros(mc);
  grads.pos_emb(0, 0) = std::numeric_limits<double>::quiet_NaN();
  OptimizerState state = OptimizerState::init(mc);
  try {
    adamw_step(params, grads, state, tc, 0.05);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("pos_emb") != std::string::npos);
  }
}
