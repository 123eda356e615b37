#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharpbench/mlp.hpp"

namespace sharpbench {

enum class DirectionNorm { kFilter, kGlobal, kNone };

DirectionNorm direction_norm_from_string(const std::string& s);
std::string to_string(DirectionNorm n);

// Two Gaussian-sampled weight-space directions in the model's layout.
// Filter normalization rescales every layout block of a direction to match
// the corresponding block norm of the trained weights; for an MLP the
// blocks are the per-layer weight matrices and biases.
struct DirectionPair {
  ParamVector d1;
  ParamVector d2;
  std::uint64_t seed = 0;
  DirectionNorm normalization = DirectionNorm::kFilter;
  // Blocks zeroed because the corresponding weight block had zero norm.
  std::vector<std::string> zeroed_blocks;
};

DirectionPair sample_directions(const MlpModel& model, std::uint64_t seed,
                                DirectionNorm normalization);

// losses[i][j] = L(w + alphas[i] * d1 + betas[j] * d2) over the dataset.
// Non-finite losses are stored as NaN and counted as overflow rather than
// aborting the grid.
struct LandscapeGrid {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<std::vector<double>> losses;
  double origin_loss = 0.0;
  std::uint64_t direction_seed = 0;
  std::string dataset_id;
  std::size_t overflow_count = 0;
};

// Grid coordinates are symmetric around 0 and contain it exactly, so the
// resolution must be odd. The model is never mutated; the origin entry is
// evaluated at w itself and equals origin_loss bit-exactly.
LandscapeGrid evaluate_grid(const MlpModel& model, const Dataset& ds,
                            const DirectionPair& dirs, double half_range,
                            std::size_t resolution,
                            const ClassWeights& weights = {},
                            const std::string& dataset_id = "");

// max - min over finite losses; the flatness comparison metric.
double grid_spread(const LandscapeGrid& grid);

// Long-format CSV: alpha,beta,loss (loss printed as nan/inf on overflow).
void write_landscape_csv(const LandscapeGrid& grid, const std::string& path);
// JSON with nulls for overflow entries plus an explicit overflow point list.
void write_landscape_json(const LandscapeGrid& grid, const std::string& path);

}  // namespace sharpbench
