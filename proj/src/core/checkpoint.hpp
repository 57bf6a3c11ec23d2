#pragma once

#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/model.hpp"
#include "core/optim.hpp"
#include "core/vocab.hpp"

namespace medroute {

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_macro_f1 = 0.0;
  double lr_last = 0.0;
};

// Self-contained model file: magic `MDRT`, u32 version, length-prefixed
// sections (config JSON, vocabulary, label codec, little-endian f64
// tensor blob), trailing CRC-64.
struct Checkpoint {
  static constexpr uint32_t kFormatVersion = 1;

  ModelConfig model_config;
  TrainConfig train_config;
  Vocabulary vocab;
  LabelCodec codec;
  ModelParams params;
  std::vector<EpochMetrics> history;

  // First 16 hex digits of the file CRC; set by save/load.
  std::string version_id;
};

void save_checkpoint(Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string history_csv(const std::vector<EpochMetrics>& history);

}  // namespace medroute
