#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharpbench/mlp.hpp"
#include "sharpbench/optim.hpp"
#include "sharpbench/sharpness.hpp"
#include "sharpbench/synthbench.hpp"

namespace sharpbench {

enum class OptimizerKind { kAdam, kSam };

OptimizerKind optimizer_kind_from_string(const std::string& s);
std::string to_string(OptimizerKind k);

// Full description of one experiment: task, model, optimizer, training
// budget, evaluation suite. Parsed from / serialized to a versioned
// key-value text file (see docs in README and parse_config).
struct ExperimentConfig {
  TaskSpec task;

  std::vector<std::size_t> hidden_dims = {32, 16};
  Activation activation = Activation::kRelu;

  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamConfig adam;  // total_steps is derived from epochs at training time
  double rho = 0.05;
  bool force_zero_perturbation = false;

  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  ClassWeights class_weights{};

  SharpnessConfig sharpness;

  // Test sets evaluated for EER/sharpness tables (matched is always
  // included) and per-axis level sweeps for the mismatch curves.
  std::vector<ShiftSpec> shifts;
  struct Curve {
    ShiftAxis axis;
    std::vector<int> levels;
  };
  std::vector<Curve> curves;

  // Default parameters applied to every ShiftSpec built by this config.
  ShiftSpec shift_defaults;

  std::string output_dir = "results";

  void validate() const;
  ShiftSpec make_shift(ShiftAxis axis, int level) const;
  std::vector<std::size_t> layer_dims() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Fixed-order serialization of every semantically meaningful field
// (output_dir excluded); the config hash is FNV-1a 64 over this text, so it
// changes iff one of those fields changes.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

void write_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace sharpbench
