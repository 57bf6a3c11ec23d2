#pragma once

#include <string>

#include "core/eval.hpp"
#include "core/model.hpp"
#include "core/optim.hpp"

namespace medroute {

// Combined pipeline configuration: {"model": {...}, "train": {...},
// "vocab": {...}}, every field optional. vocab_size and n_classes are
// filled in later from the data.
struct PipelineConfig {
  ModelConfig model;
  TrainConfig train;
  VocabSpec vocab;
  double baseline_lr = 0.5;
};

PipelineConfig parse_pipeline_config(const std::string& json_text);

}  // namespace medroute
