// Dev probe for the SAM-vs-Adam margins: sweeps training strength knobs and
// prints mean EER/sharpness on the high-shift suite. Not a test.
#include <cstdio>
#include <vector>

#include "sharpbench/harness.hpp"
#include "sharpbench/sharpness.hpp"

using namespace sharpbench;

int main() {
  ExperimentConfig base;
  base.task.feature_dim = 20;
  base.task.n_train = 4096;
  base.task.n_eval = 2048;
  base.task.n_train_attacks = 6;
  base.task.base_seed = 42;
  base.hidden_dims = {32, 16};
  base.adam.lr_max = 3e-3;
  base.adam.weight_decay = 1e-4;
  base.batch_size = 32;
  base.seeds = {1, 2, 3, 4, 5};
  base.sharpness.rho = 0.05;
  base.sharpness.batch_size = 32;
  base.sharpness.ascent_steps = 12;
  base.sharpness.restarts = 2;
  base.sharpness.seed = 7;

  GeneratedDataset train = generate_train(base.task);
  std::vector<std::pair<std::string, Dataset>> suite;
  suite.emplace_back("attack4",
                     generate_shifted_test(base.task,
                                           base.make_shift(ShiftAxis::kAttack, 4))
                         .data);
  suite.emplace_back(
      "channel5",
      generate_shifted_test(base.task, base.make_shift(ShiftAxis::kChannel, 5))
          .data);
  suite.emplace_back(
      "language3",
      generate_shifted_test(base.task, base.make_shift(ShiftAxis::kLanguage, 3))
          .data);
  suite.emplace_back(
      "speaker5",
      generate_shifted_test(base.task, base.make_shift(ShiftAxis::kSpeaker, 5))
          .data);

  struct Variant {
    const char* name;
    OptimizerKind kind;
    double rho;
    std::size_t epochs;
    double lr_min;
  };
  const std::vector<Variant> variants = {
      {"adam e24", OptimizerKind::kAdam, 0.0, 24, 1.5e-4},
      {"sam05 e24", OptimizerKind::kSam, 0.05, 24, 1.5e-4},
      {"sam10 e24", OptimizerKind::kSam, 0.10, 24, 1.5e-4},
      {"adam e48", OptimizerKind::kAdam, 0.0, 48, 3e-5},
      {"sam05 e48", OptimizerKind::kSam, 0.05, 48, 3e-5},
      {"sam10 e48", OptimizerKind::kSam, 0.10, 48, 3e-5},
  };

  for (const Variant& v : variants) {
    ExperimentConfig cfg = base;
    cfg.optimizer = v.kind;
    cfg.rho = v.rho;
    cfg.epochs = v.epochs;
    cfg.adam.lr_min = v.lr_min;
    std::vector<MlpModel> models;
    for (std::uint64_t seed : base.seeds) {
      models.push_back(train_model(cfg, seed, train.data, nullptr));
    }
    std::printf("%-10s", v.name);
    for (const auto& [name, ds] : suite) {
      double e = 0.0, s = 0.0;
      for (const MlpModel& m : models) {
        e += evaluate_eer(m, ds).eer;
        s += dataset_sharpness(m, ds, base.sharpness).mean;
      }
      std::printf("  %s: e=%.4f s=%.5f", name.c_str(), e / 5.0, s / 5.0);
    }
    std::printf("\n");
    std::fflush(stdout);
  }
  return 0;
}
