#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sharpbench/dataset.hpp"
#include "sharpbench/param_vector.hpp"
#include "sharpbench/tensor.hpp"

namespace sharpbench {

enum class Activation { kRelu, kTanh };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Per-class loss weights, multiplied into the per-example NLL of the true
// class. Defaults follow the 0.9 bona fide / 0.1 spoof training recipe.
struct ClassWeights {
  double bona = 0.9;
  double spoof = 0.1;

  double of(int label) const { return label == kBonaFide ? bona : spoof; }
  void validate() const;
};

// Feed-forward classifier on fixed-dimension feature vectors. Hidden layers
// use the configured activation; the final layer emits 2 raw logits
// (bona fide, spoof). Parameters live in one flat ParamVector with blocks
// "layer<k>.weight" (out x in, row-major) and "layer<k>.bias".
struct MlpModel {
  std::vector<std::size_t> layer_dims;  // input, hidden..., 2
  Activation activation = Activation::kRelu;
  ParamVector params;

  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  std::size_t num_affine_layers() const { return layer_dims.size() - 1; }

  // Layout with all-zero values.
  static ParamVector make_layout(const std::vector<std::size_t>& layer_dims);

  // Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases,
  // drawn deterministically from `seed` layer by layer.
  static MlpModel init(std::vector<std::size_t> layer_dims,
                       Activation activation, std::uint64_t seed);

  // Same architecture, different parameter values (layouts must match).
  MlpModel with_params(ParamVector p) const;
};

// Logits for a feature matrix, shape (m, 2). Deterministic for fixed inputs.
Tensor forward(const MlpModel& model, const Tensor& features);
inline Tensor forward(const MlpModel& model, const Batch& batch) {
  return forward(model, batch.features);
}

struct WceResult {
  double mean_loss = 0.0;
  std::vector<double> per_example;
};

// per_example[i] = class_weights[y_i] * (-log softmax(logits_i)[y_i]),
// stabilized with log-sum-exp; mean_loss is the unweighted arithmetic mean
// of the weighted per-example losses.
WceResult weighted_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels,
                                 const ClassWeights& weights);

struct LossGrad {
  double loss = 0.0;
  ParamVector grad;
};

// Mean weighted CE over the batch plus its exact analytic gradient with
// respect to all parameters, in the model's layout.
LossGrad loss_and_grad(const MlpModel& model, const Batch& batch,
                       const ClassWeights& weights = {});

double batch_loss(const MlpModel& model, const Batch& batch,
                  const ClassWeights& weights = {});

// Mean weighted CE over a whole dataset, evaluated in dataset order.
double dataset_loss(const MlpModel& model, const Dataset& ds,
                    const ClassWeights& weights = {});

}  // namespace sharpbench
