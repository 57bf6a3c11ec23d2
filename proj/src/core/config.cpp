#include "core/config.hpp"

#include <json.hpp>

#include "core/error.hpp"

namespace medroute {

PipelineConfig parse_pipeline_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = json_text.empty() ? nlohmann::json::object()
                          : nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("invalid config JSON: ") + e.what());
  }

  PipelineConfig cfg;
  if (j.contains("model")) {
    const auto& m = j["model"];
    cfg.model.max_len = m.value("max_len", cfg.model.max_len);
    cfg.model.d_model = m.value("d_model", cfg.model.d_model);
    cfg.model.n_heads = m.value("n_heads", cfg.model.n_heads);
    cfg.model.n_layers = m.value("n_layers", cfg.model.n_layers);
    cfg.model.d_ff = m.value("d_ff", cfg.model.d_ff);
    cfg.model.dropout_rate = m.value("dropout_rate", cfg.model.dropout_rate);
    cfg.model.seed = m.value("seed", cfg.model.seed);
    cfg.model.vocab_size = m.value("vocab_size", cfg.model.vocab_size);
    cfg.model.n_classes = m.value("n_classes", cfg.model.n_classes);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    cfg.train.peak_lr = t.value("peak_lr", cfg.train.peak_lr);
    cfg.train.warmup_steps = t.value("warmup_steps", cfg.train.warmup_steps);
    cfg.train.total_steps = t.value("total_steps", cfg.train.total_steps);
    cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
    cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
    cfg.train.eps = t.value("eps", cfg.train.eps);
    cfg.train.weight_decay = t.value("weight_decay", cfg.train.weight_decay);
    cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
    cfg.train.epochs = t.value("epochs", cfg.train.epochs);
    cfg.train.seed = t.value("seed", cfg.train.seed);
    cfg.train.dropout_override =
        t.value("dropout_override", cfg.train.dropout_override);
  }
  if (j.contains("vocab")) {
    const auto& v = j["vocab"];
    cfg.vocab.min_freq = v.value("min_freq", cfg.vocab.min_freq);
    cfg.vocab.max_size = v.value("max_size", cfg.vocab.max_size);
  }
  cfg.baseline_lr = j.value("baseline_lr", cfg.baseline_lr);
  return cfg;
}

}  // namespace medroute
