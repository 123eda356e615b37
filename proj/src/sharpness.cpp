#include "sharpbench/sharpness.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sharpbench/rng.hpp"

#include "nlohmann/json.hpp"

namespace sharpbench {

void SharpnessConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("SharpnessConfig: rho must be > 0");
  if (ascent_steps < 1) {
    throw std::invalid_argument("SharpnessConfig: ascent_steps must be >= 1");
  }
  if (restarts < 1) {
    throw std::invalid_argument("SharpnessConfig: restarts must be >= 1");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("SharpnessConfig: batch_size must be >= 1");
  }
  class_weights.validate();
}

namespace {

constexpr double kTinyNorm = 1e-12;

// Uniform draw inside the L2 ball of radius rho: Gaussian direction scaled
// to radius rho * u^(1/dim).
ParamVector random_in_ball(const ParamVector& like, double rho, Rng& rng) {
  ParamVector eps = ParamVector::zeros_like(like);
  for (double& v : eps.values()) v = rng.normal();
  const double norm = param_norm2(eps);
  if (norm <= kTinyNorm) return eps;  // essentially zero, keep it
  const double dim = static_cast<double>(eps.size());
  const double radius = rho * std::pow(rng.uniform(), 1.0 / dim);
  param_scale_inplace(radius / norm, eps);
  return eps;
}

void project_to_ball(ParamVector& eps, double rho) {
  const double norm = param_norm2(eps);
  if (norm > rho) param_scale_inplace(rho / norm, eps);
}

// Estimator seed derived from the batch content (FNV-1a over the raw
// feature/label bytes). Identical batches get identical ascent draws, so
// per-batch values are a pure function of (model, batch, config) and
// duplicating a dataset leaves the mean sharpness exactly unchanged.
std::uint64_t batch_content_hash(const Batch& batch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix_bytes(batch.features.data.data(),
            batch.features.data.size() * sizeof(double));
  mix_bytes(batch.labels.data(), batch.labels.size() * sizeof(int));
  return h;
}

}  // namespace

double max_loss_increase(const LossGradFn& f, const ParamVector& w,
                         const SharpnessConfig& cfg, std::size_t* discarded) {
  cfg.validate();
  if (!w.all_finite()) {
    throw std::invalid_argument("max_loss_increase: non-finite parameters");
  }

  LossGrad at_w = f(w);
  if (!std::isfinite(at_w.loss)) {
    throw std::runtime_error("max_loss_increase: non-finite loss at w");
  }
  const double base = at_w.loss;

  double best = 0.0;  // eps = 0 candidate; keeps the result non-negative

  // One-step analytic candidate, the first-order maximizer.
  const double gnorm = param_norm2(at_w.grad);
  if (gnorm > kTinyNorm) {
    ParamVector eps = param_scale(cfg.rho / gnorm, at_w.grad);
    ParamVector point = param_axpy(1.0, eps, w);
    const double loss = f(point).loss;
    if (std::isfinite(loss)) {
      best = std::max(best, loss - base);
    } else if (discarded) {
      ++*discarded;
    }
  }

  // Multi-start projected gradient ascent with normalized steps. The best
  // iterate per run is kept, so extending a run can never lower its value.
  const double lr = cfg.effective_ascent_lr();
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng rng(mix_seed(cfg.seed, 0x9a5cu, r));
    ParamVector eps = random_in_ball(w, cfg.rho, rng);
    bool bad = false;
    for (std::size_t s = 0; s <= cfg.ascent_steps; ++s) {
      ParamVector point = param_axpy(1.0, eps, w);
      LossGrad lg = f(point);
      if (!std::isfinite(lg.loss)) {
        bad = true;
        break;
      }
      best = std::max(best, lg.loss - base);
      if (s == cfg.ascent_steps) break;
      const double n = param_norm2(lg.grad);
      if (n <= kTinyNorm) break;  // stationary, nothing left to climb
      param_axpy_inplace(lr / n, lg.grad, eps);
      project_to_ball(eps, cfg.rho);
    }
    if (bad && discarded) ++*discarded;
  }
  return best;
}

double batch_sharpness(const MlpModel& model, const Batch& batch,
                       const SharpnessConfig& cfg) {
  SharpnessConfig per_batch = cfg;
  per_batch.seed = mix_seed(cfg.seed, batch_content_hash(batch));
  LossGradFn f = [&](const ParamVector& p) {
    return loss_and_grad(model.with_params(p), batch, cfg.class_weights);
  };
  return max_loss_increase(f, model.params, per_batch);
}

SharpnessReport dataset_sharpness(const MlpModel& model, const Dataset& ds,
                                  const SharpnessConfig& cfg,
                                  const std::string& model_id,
                                  const std::string& dataset_id) {
  cfg.validate();
  if (ds.size() == 0) {
    throw std::invalid_argument("dataset_sharpness: empty dataset");
  }

  SharpnessReport report;
  report.config = cfg;
  report.model_id = model_id;
  report.dataset_id = dataset_id;
  report.has_partial_batch = (ds.size() % cfg.batch_size) != 0;

  const std::vector<Batch> batches = ds.batches(cfg.batch_size);
  for (const Batch& batch : batches) {
    SharpnessConfig per_batch = cfg;
    per_batch.seed = mix_seed(cfg.seed, batch_content_hash(batch));
    LossGradFn f = [&](const ParamVector& p) {
      return loss_and_grad(model.with_params(p), batch, cfg.class_weights);
    };
    report.per_batch.push_back(max_loss_increase(
        f, model.params, per_batch, &report.discarded_candidates));
  }

  double sum = 0.0;
  for (double v : report.per_batch) sum += v;
  report.mean = sum / static_cast<double>(report.per_batch.size());
  if (report.per_batch.size() > 1) {
    double ss = 0.0;
    for (double v : report.per_batch) {
      ss += (v - report.mean) * (v - report.mean);
    }
    report.stddev =
        std::sqrt(ss / static_cast<double>(report.per_batch.size() - 1));
  }
  return report;
}

std::string sharpness_report_json(const SharpnessReport& report) {
  nlohmann::ordered_json j;
  j["per_batch"] = report.per_batch;
  j["mean"] = report.mean;
  j["stddev"] = report.stddev;
  j["config"] = {{"rho", report.config.rho},
                 {"batch_size", report.config.batch_size},
                 {"ascent_steps", report.config.ascent_steps},
                 {"ascent_lr", report.config.effective_ascent_lr()},
                 {"restarts", report.config.restarts},
                 {"seed", report.config.seed},
                 {"class_weight_bona", report.config.class_weights.bona},
                 {"class_weight_spoof", report.config.class_weights.spoof}};
  j["model_id"] = report.model_id;
  j["dataset_id"] = report.dataset_id;
  j["has_partial_batch"] = report.has_partial_batch;
  j["discarded_candidates"] = report.discarded_candidates;
  return j.dump(2);
}

void write_sharpness_json(const SharpnessReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << sharpness_report_json(report) << "\n";
}

void write_sharpness_csv(const SharpnessReport& report,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "model_id,dataset_id,rho,batch_size,n_batches,mean,stddev,"
         "has_partial_batch\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g", report.mean, report.stddev);
  out << report.model_id << "," << report.dataset_id << ","
      << report.config.rho << "," << report.config.batch_size << ","
      << report.per_batch.size() << "," << buf << ","
      << (report.has_partial_batch ? 1 : 0) << "\n";
}

}  // namespace sharpbench
