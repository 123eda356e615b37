// Dev calibration probe: prints sharpness/EER curves per mismatch axis for
// Adam- and SAM-trained models on the acceptance task. Not a test.
#include <cstdio>
#include <map>

#include "sharpbench/harness.hpp"
#include "sharpbench/landscape.hpp"
#include "sharpbench/sharpness.hpp"

using namespace sharpbench;

namespace {

ExperimentConfig probe_config() {
  ExperimentConfig cfg;
  cfg.task.feature_dim = 20;
  cfg.task.n_train = 4096;
  cfg.task.n_eval = 2048;
  cfg.task.n_train_attacks = 6;
  cfg.task.class_balance = 0.5;
  cfg.task.base_seed = 42;
  cfg.hidden_dims = {32, 16};
  cfg.activation = Activation::kRelu;
  cfg.adam.lr_max = 3e-3;
  cfg.adam.lr_min = 1.5e-4;
  cfg.adam.weight_decay = 1e-4;
  cfg.epochs = 24;
  cfg.batch_size = 32;
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.rho = 0.05;
  cfg.sharpness.rho = 0.05;
  cfg.sharpness.batch_size = 32;
  cfg.sharpness.ascent_steps = 12;
  cfg.sharpness.restarts = 2;
  cfg.sharpness.seed = 7;
  cfg.output_dir = "probe_out";
  return cfg;
}

}  // namespace

int main() {
  ExperimentConfig cfg = probe_config();
  GeneratedDataset train = generate_train(cfg.task);

  std::map<std::string, std::vector<MlpModel>> models;
  for (OptimizerKind kind : {OptimizerKind::kAdam, OptimizerKind::kSam}) {
    ExperimentConfig c = cfg;
    c.optimizer = kind;
    for (std::uint64_t seed : cfg.seeds) {
      models[to_string(kind)].push_back(
          train_model(c, seed, train.data, nullptr));
    }
  }

  SharpnessConfig sharp = cfg.sharpness;

  auto report = [&](const std::string& name, const Dataset& ds) {
    std::printf("%-14s", name.c_str());
    for (const auto& [opt, ms] : models) {
      double mean_s = 0.0, mean_e = 0.0;
      for (const MlpModel& m : ms) {
        mean_s += dataset_sharpness(m, ds, sharp).mean;
        mean_e += evaluate_eer(m, ds).eer;
      }
      mean_s /= ms.size();
      mean_e /= ms.size();
      std::printf("  %s: s=%.5f e=%.4f", opt.c_str(), mean_s, mean_e);
    }
    std::printf("\n");
    std::fflush(stdout);
  };

  report("matched", generate_matched_eval(cfg.task).data);
  for (int level : {1, 2, 3, 4}) {
    report("attack-L" + std::to_string(level),
           generate_shifted_test(cfg.task,
                                 cfg.make_shift(ShiftAxis::kAttack, level))
               .data);
  }
  for (int level : {1, 3, 5}) {
    report("channel-L" + std::to_string(level),
           generate_shifted_test(cfg.task,
                                 cfg.make_shift(ShiftAxis::kChannel, level))
               .data);
  }
  for (int level : {1, 3, 5, 7}) {
    report("speaker-L" + std::to_string(level),
           generate_shifted_test(cfg.task,
                                 cfg.make_shift(ShiftAxis::kSpeaker, level))
               .data);
  }
  for (int level : {1, 2, 3}) {
    report("language-L" + std::to_string(level),
           generate_shifted_test(cfg.task,
                                 cfg.make_shift(ShiftAxis::kLanguage, level))
               .data);
  }

  // Landscape spread per seed.
  GeneratedDataset eval = generate_matched_eval(cfg.task);
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const MlpModel& ma = models["adam"][i];
    const MlpModel& ms = models["sam"][i];
    DirectionPair da = sample_directions(ma, cfg.seeds[i], DirectionNorm::kFilter);
    DirectionPair dsm = sample_directions(ms, cfg.seeds[i], DirectionNorm::kFilter);
    LandscapeGrid ga = evaluate_grid(ma, eval.data, da, 1.0, 21);
    LandscapeGrid gs = evaluate_grid(ms, eval.data, dsm, 1.0, 21);
    std::printf("spread seed %llu: adam=%.4f sam=%.4f\n",
                (unsigned long long)cfg.seeds[i], grid_spread(ga),
                grid_spread(gs));
    std::fflush(stdout);
  }
  return 0;
}
