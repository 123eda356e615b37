#pragma once

#include <string>

#include "sharpbench/mlp.hpp"

namespace sharpbench {

// Versioned plain-text checkpoint. Values are written with 17 significant
// digits, which round-trips IEEE doubles bit-exactly through strtod.
//
//   sharpbench-checkpoint v1
//   layer_dims <d0> <d1> ... <dk>
//   activation <relu|tanh>
//   param_count <n>
//   <one value per line, layout order>
std::string checkpoint_to_string(const MlpModel& model);
MlpModel checkpoint_from_string(const std::string& text);

void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

}  // namespace sharpbench
