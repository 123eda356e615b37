#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharpbench/mlp.hpp"
#include "sharpbench/optim.hpp"

namespace sharpbench {

// Estimator settings for the per-batch worst-case loss increase inside an
// L2 ball of radius rho over all parameters jointly.
struct SharpnessConfig {
  double rho = 0.05;
  std::size_t batch_size = 32;
  std::size_t ascent_steps = 20;
  double ascent_lr = 0.0;  // 0 selects rho / 10
  std::size_t restarts = 3;
  std::uint64_t seed = 0;
  ClassWeights class_weights{};

  double effective_ascent_lr() const {
    return ascent_lr > 0.0 ? ascent_lr : rho / 10.0;
  }
  void validate() const;
};

struct SharpnessReport {
  std::vector<double> per_batch;
  double mean = 0.0;
  double stddev = 0.0;  // sample std over batches, 0 for a single batch
  SharpnessConfig config;
  std::string model_id;
  std::string dataset_id;
  bool has_partial_batch = false;
  std::size_t discarded_candidates = 0;  // ascent runs hit non-finite loss
};

// Max over candidate perturbations of [loss(w + eps) - loss(w)]:
//   - eps = 0 (guarantees a non-negative result),
//   - the one-step analytic point rho * g / ||g||,
//   - `restarts` runs of projected gradient ascent with normalized steps,
//     seeded starts uniform in the ball, best iterate kept per run.
// Candidates whose loss turns non-finite are discarded and counted in
// *discarded when provided.
double max_loss_increase(const LossGradFn& f, const ParamVector& w,
                         const SharpnessConfig& cfg,
                         std::size_t* discarded = nullptr);

double batch_sharpness(const MlpModel& model, const Batch& batch,
                       const SharpnessConfig& cfg);

// Per-batch sharpness in deterministic dataset order (no shuffling),
// averaged over the dataset; the m-sharpness protocol. The last partial
// batch is included with equal weight and flagged in the report.
SharpnessReport dataset_sharpness(const MlpModel& model, const Dataset& ds,
                                  const SharpnessConfig& cfg,
                                  const std::string& model_id = "",
                                  const std::string& dataset_id = "");

std::string sharpness_report_json(const SharpnessReport& report);
void write_sharpness_json(const SharpnessReport& report,
                          const std::string& path);
// One-row summary (with header) for cross-system tables.
void write_sharpness_csv(const SharpnessReport& report,
                         const std::string& path);

}  // namespace sharpbench
