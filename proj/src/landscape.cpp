#include "sharpbench/landscape.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sharpbench/rng.hpp"

#include "nlohmann/json.hpp"

namespace sharpbench {

DirectionNorm direction_norm_from_string(const std::string& s) {
  if (s == "filter") return DirectionNorm::kFilter;
  if (s == "global") return DirectionNorm::kGlobal;
  if (s == "none") return DirectionNorm::kNone;
  throw std::invalid_argument("unknown direction normalization: " + s);
}

std::string to_string(DirectionNorm n) {
  switch (n) {
    case DirectionNorm::kFilter: return "filter";
    case DirectionNorm::kGlobal: return "global";
    default: return "none";
  }
}

namespace {

double block_norm(std::span<const double> b) {
  double acc = 0.0;
  for (double v : b) acc += v * v;
  return std::sqrt(acc);
}

ParamVector sample_one_direction(const MlpModel& model, std::uint64_t seed,
                                 DirectionNorm normalization,
                                 std::vector<std::string>* zeroed) {
  ParamVector d = ParamVector::zeros_like(model.params);
  Rng rng(seed);
  for (double& v : d.values()) v = rng.normal();

  switch (normalization) {
    case DirectionNorm::kNone:
      break;
    case DirectionNorm::kGlobal: {
      const double wn = param_norm2(model.params);
      const double dn = param_norm2(d);
      if (dn > 0.0) param_scale_inplace(wn / dn, d);
      break;
    }
    case DirectionNorm::kFilter: {
      for (std::size_t b = 0; b < d.layout().size(); ++b) {
        auto db = d.block(b);
        const double wn = block_norm(model.params.block(b));
        const double dn = block_norm(db);
        if (wn == 0.0 || dn == 0.0) {
          for (double& v : db) v = 0.0;
          if (zeroed) zeroed->push_back(d.layout()[b].name);
        } else {
          const double scale = wn / dn;
          for (double& v : db) v *= scale;
        }
      }
      break;
    }
  }
  return d;
}

}  // namespace

DirectionPair sample_directions(const MlpModel& model, std::uint64_t seed,
                                DirectionNorm normalization) {
  if (!model.params.all_finite()) {
    throw std::invalid_argument("sample_directions: non-finite parameters");
  }
  DirectionPair pair;
  pair.seed = seed;
  pair.normalization = normalization;
  pair.d1 = sample_one_direction(model, mix_seed(seed, 1), normalization,
                                 &pair.zeroed_blocks);
  pair.d2 = sample_one_direction(model, mix_seed(seed, 2), normalization,
                                 &pair.zeroed_blocks);
  return pair;
}

LandscapeGrid evaluate_grid(const MlpModel& model, const Dataset& ds,
                            const DirectionPair& dirs, double half_range,
                            std::size_t resolution,
                            const ClassWeights& weights,
                            const std::string& dataset_id) {
  if (resolution % 2 == 0) {
    throw std::invalid_argument("evaluate_grid: resolution must be odd");
  }
  if (!(half_range > 0.0)) {
    throw std::invalid_argument("evaluate_grid: half_range must be > 0");
  }
  if (!dirs.d1.same_layout(model.params) ||
      !dirs.d2.same_layout(model.params)) {
    throw std::invalid_argument("evaluate_grid: direction layout mismatch");
  }

  LandscapeGrid grid;
  grid.direction_seed = dirs.seed;
  grid.dataset_id = dataset_id;

  const std::size_t center = (resolution - 1) / 2;
  const double step =
      center == 0 ? 0.0 : half_range / static_cast<double>(center);
  for (std::size_t k = 0; k < resolution; ++k) {
    const double coord =
        (static_cast<double>(k) - static_cast<double>(center)) * step;
    grid.alphas.push_back(coord);
    grid.betas.push_back(coord);
  }

  grid.origin_loss = dataset_loss(model, ds, weights);

  grid.losses.assign(resolution, std::vector<double>(resolution, 0.0));
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const double a = grid.alphas[i];
      const double b = grid.betas[j];
      if (a == 0.0 && b == 0.0) {
        grid.losses[i][j] = grid.origin_loss;
        continue;
      }
      ParamVector p = param_clone(model.params);
      param_axpy_inplace(a, dirs.d1, p);
      param_axpy_inplace(b, dirs.d2, p);
      double loss;
      try {
        loss = dataset_loss(model.with_params(std::move(p)), ds, weights);
      } catch (const std::invalid_argument&) {
        // Perturbed weights overflowed into non-finite logits.
        loss = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(loss)) {
        grid.losses[i][j] = std::numeric_limits<double>::quiet_NaN();
        ++grid.overflow_count;
      } else {
        grid.losses[i][j] = loss;
      }
    }
  }
  return grid;
}

double grid_spread(const LandscapeGrid& grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : grid.losses) {
    for (double v : row) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi >= lo)) {
    throw std::runtime_error("grid_spread: no finite losses in grid");
  }
  return hi - lo;
}

void write_landscape_csv(const LandscapeGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "alpha,beta,loss\n";
  char buf[120];
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    for (std::size_t j = 0; j < grid.betas.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", grid.alphas[i],
                    grid.betas[j], grid.losses[i][j]);
      out << buf << "\n";
    }
  }
}

void write_landscape_json(const LandscapeGrid& grid, const std::string& path) {
  nlohmann::ordered_json j;
  j["alphas"] = grid.alphas;
  j["betas"] = grid.betas;
  nlohmann::ordered_json rows = nlohmann::json::array();
  nlohmann::ordered_json overflow = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.losses.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::json::array();
    for (std::size_t k = 0; k < grid.losses[i].size(); ++k) {
      const double v = grid.losses[i][k];
      if (std::isfinite(v)) {
        row.push_back(v);
      } else {
        row.push_back(nullptr);
        overflow.push_back({i, k});
      }
    }
    rows.push_back(std::move(row));
  }
  j["losses"] = std::move(rows);
  j["origin_loss"] = grid.origin_loss;
  j["direction_seed"] = grid.direction_seed;
  j["dataset_id"] = grid.dataset_id;
  j["overflow_points"] = std::move(overflow);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace sharpbench
