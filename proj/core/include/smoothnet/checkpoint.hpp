#pragma once

#include <cstdint>
#include <string>

#include "smoothnet/model.hpp"

namespace smoothnet {

struct TrainMeta {
  int epochs = 0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
};

struct Checkpoint {
  SmoothNetConfig config;
  SmoothNetWeights weights;
  TrainMeta meta;
};

// JSON document with config, named weight tensors, and train_meta.
// Weights are rounded through 32-bit floats on save; loading accepts any
// finite numbers and validates shapes against the config.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace smoothnet
