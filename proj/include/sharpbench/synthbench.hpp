#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharpbench/dataset.hpp"

namespace sharpbench {

// Parameters of one synthetic bona-fide/spoof task. Bona fide samples come
// from a fixed 3-component Gaussian mixture, spoof samples from
// n_train_attacks seeded Gaussian clusters on the other side of a random
// separation direction.
struct TaskSpec {
  std::size_t feature_dim = 20;
  std::size_t n_train = 4000;
  std::size_t n_eval = 2000;
  std::size_t n_train_attacks = 6;
  double class_balance = 0.5;  // bona fide fraction
  std::uint64_t base_seed = 1;

  void validate() const;
};

enum class ShiftAxis { kLanguage, kAttack, kChannel, kSpeaker };

ShiftAxis shift_axis_from_string(const std::string& s);
std::string to_string(ShiftAxis axis);

// One controllable mismatch between training and test distributions.
// Level 0 reproduces the matched test distribution exactly on every axis.
//   language: fixed random offset added to all samples, norm level*magnitude
//   attack:   spoof drawn from `level` unseen clusters (disjoint seeds,
//             progressively farther from the training spoof region),
//             total sample count unchanged
//   channel:  samples partitioned into `level` groups, each through a
//             distinct seeded linear transform plus Gaussian noise, with
//             condition severity growing across the condition bank
//   speaker:  each class resampled from `level` subclusters around the
//             class mean with reduced within-subcluster variance; subcluster
//             means are recentered so class means are preserved exactly
struct ShiftSpec {
  ShiftAxis axis = ShiftAxis::kAttack;
  int level = 0;
  double language_magnitude = 0.5;
  double channel_strength = 0.08;
  double channel_noise = 0.1;
  double speaker_spread = 0.5;
  int max_level = 8;

  void validate() const;
};

struct Provenance {
  TaskSpec task;
  ShiftSpec shift;
  bool is_train = false;
  std::vector<std::string> cluster_ids;  // spoof generators present
  // Channel condition id per row (aligned with the dataset rows), recorded
  // for channel shifts only.
  std::vector<int> channel_conditions;
  std::string name;  // e.g. "train", "attack-L4"
};

// Dataset plus everything needed to regenerate it bit-identically.
struct GeneratedDataset {
  Dataset data;
  Provenance provenance;
};

GeneratedDataset generate_train(const TaskSpec& task);
GeneratedDataset generate_matched_eval(const TaskSpec& task);
GeneratedDataset generate_shifted_test(const TaskSpec& task,
                                       const ShiftSpec& shift);

// True class mean of the generating distribution (bona: mixture mean,
// spoof: mean over training attack clusters). Used by diagnostics/tests.
std::vector<double> true_class_mean(const TaskSpec& task, int label);

// JSON provenance sidecar next to the dataset CSV.
std::string provenance_json(const Provenance& prov);
void write_generated_dataset(const GeneratedDataset& gd,
                             const std::string& csv_path);

}  // namespace sharpbench
