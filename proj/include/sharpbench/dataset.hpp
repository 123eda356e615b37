#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharpbench/tensor.hpp"

namespace sharpbench {

// Labels: 0 = bona fide, 1 = spoof.
inline constexpr int kBonaFide = 0;
inline constexpr int kSpoof = 1;

// A batch of labeled samples. Features are (m, d), labels length m.
// Inputs are validated here: non-finite features are rejected up front.
struct Batch {
  Tensor features;
  std::vector<int> labels;

  Batch() = default;
  Batch(Tensor features_, std::vector<int> labels_);

  std::size_t size() const { return labels.size(); }
  std::size_t feature_dim() const { return features.cols(); }
};

// Ordered sample collection with deterministic batching. Iterating twice
// with the same seed yields identical batch sequences.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Tensor features, std::vector<int> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t feature_dim() const { return features_.cols(); }
  const Tensor& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  Batch subset(const std::vector<std::size_t>& indices) const;

  // Batches in dataset order, last one possibly partial. Evaluation context.
  std::vector<Batch> batches(std::size_t batch_size) const;

  // Seeded Fisher-Yates permutation, then sequential batches. Training
  // context; same seed gives an identical sequence.
  std::vector<Batch> shuffled_batches(std::size_t batch_size,
                                      std::uint64_t seed) const;

 private:
  Tensor features_;
  std::vector<int> labels_;
};

// CSV interchange format: header feature_0,...,feature_{d-1},label with one
// sample per row, values printed at full round-trip precision.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace sharpbench
