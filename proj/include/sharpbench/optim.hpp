#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "sharpbench/mlp.hpp"
#include "sharpbench/param_vector.hpp"

namespace sharpbench {

// Adam with decoupled weight decay and a cosine-annealed learning rate.
struct AdamConfig {
  double lr_max = 1e-4;
  double lr_min = 5e-6;
  std::size_t total_steps = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;

  void validate() const;
};

struct AdamState {
  ParamVector first_moment;
  ParamVector second_moment;
  std::size_t step_count = 0;

  static AdamState init(const ParamVector& like);
};

struct SamConfig {
  double rho = 0.05;
  AdamConfig base;
  // Debug switch: zero perturbation reduces every step to plain Adam.
  bool force_zero_perturbation = false;

  void validate() const;
};

// lr(t) = lr_min + (lr_max - lr_min)/2 * (1 + cos(pi * t / total_steps)).
// Endpoints are returned exactly. Throws if step > total_steps.
double cosine_lr(const AdamConfig& cfg, std::size_t step);

// One Adam update at the scheduled learning rate. Decoupled weight decay
// (w -= lr * wd * w) is applied before the Adam delta; moments advance.
// Throws on layout mismatch and on non-finite gradients, naming the first
// bad coordinate.
ParamVector adam_step(AdamState& state, const AdamConfig& cfg,
                      const ParamVector& w, const ParamVector& grad,
                      std::size_t step);

struct Perturbation {
  ParamVector eps;
  bool degenerate = false;  // ||grad|| below threshold, eps is zero
};

// eps_hat = rho * grad / ||grad||_2, the first-order maximizer of the
// neighborhood loss. Gradient norms <= 1e-12 yield the zero perturbation
// with the degenerate flag set.
Perturbation sam_perturbation(const ParamVector& grad, double rho);

struct StepReport {
  std::size_t step = 0;
  double lr = 0.0;
  double loss_w = 0.0;           // loss at w
  double loss_w_plus_eps = 0.0;  // loss at w + eps_hat
  double eps_norm = 0.0;
  bool degenerate = false;
  int grad_evals = 0;
};

// Loss/gradient oracle over a parameter vector; lets the SAM machinery run
// on toy losses and test-only base optimizers as well as real models.
using LossGradFn = std::function<LossGrad(const ParamVector&)>;

// The two-evaluation SAM gradient: g2 = grad of the loss at w + eps_hat(w),
// where eps_hat comes from the gradient at w. Always costs exactly two
// oracle evaluations; the report carries both losses and the counter.
struct SamGradient {
  ParamVector grad;
  StepReport report;
};
SamGradient sam_gradient(const LossGradFn& f, const ParamVector& w, double rho,
                         bool force_zero_perturbation = false);

// Full SAM step on a model/batch: perturb, re-evaluate, restore, then apply
// the Adam update with the perturbed-point gradient. Adam state advances
// once, driven by g2 only.
std::pair<ParamVector, StepReport> sam_step(const MlpModel& model,
                                            const Batch& batch,
                                            AdamState& state,
                                            const SamConfig& cfg,
                                            std::size_t step,
                                            const ClassWeights& weights = {});

}  // namespace sharpbench
