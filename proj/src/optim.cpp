#include "sharpbench/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sharpbench {

void AdamConfig::validate() const {
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw std::invalid_argument("AdamConfig: betas must be in [0, 1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("AdamConfig: eps must be > 0");
  if (lr_min > lr_max) {
    throw std::invalid_argument("AdamConfig: lr_min must be <= lr_max");
  }
  if (weight_decay < 0.0) {
    throw std::invalid_argument("AdamConfig: weight_decay must be >= 0");
  }
  if (total_steps == 0) {
    throw std::invalid_argument("AdamConfig: total_steps must be >= 1");
  }
}

AdamState AdamState::init(const ParamVector& like) {
  return AdamState{ParamVector::zeros_like(like), ParamVector::zeros_like(like),
                   0};
}

void SamConfig::validate() const {
  if (!(rho > 0.0) || rho > 1.0) {
    throw std::invalid_argument("SamConfig: rho must be in (0, 1]");
  }
  base.validate();
}

double cosine_lr(const AdamConfig& cfg, std::size_t step) {
  if (step > cfg.total_steps) {
    throw std::out_of_range("cosine_lr: step " + std::to_string(step) +
                            " beyond total_steps " +
                            std::to_string(cfg.total_steps));
  }
  // Exact endpoints; the closed form only approximates them in floats.
  if (step == 0) return cfg.lr_max;
  if (step == cfg.total_steps) return cfg.lr_min;
  const double frac =
      static_cast<double>(step) / static_cast<double>(cfg.total_steps);
  return cfg.lr_min + 0.5 * (cfg.lr_max - cfg.lr_min) *
                          (1.0 + std::cos(std::numbers::pi * frac));
}

ParamVector adam_step(AdamState& state, const AdamConfig& cfg,
                      const ParamVector& w, const ParamVector& grad,
                      std::size_t step) {
  cfg.validate();
  if (!w.same_layout(grad) || !w.same_layout(state.first_moment)) {
    throw std::invalid_argument("adam_step: layout mismatch");
  }
  if (!grad.all_finite()) {
    throw std::runtime_error("adam_step: non-finite gradient at " +
                             grad.first_non_finite());
  }

  const double lr = cosine_lr(cfg, step);
  ParamVector out = param_clone(w);
  auto& wv = out.values();

  if (cfg.weight_decay > 0.0) {
    const double decay = lr * cfg.weight_decay;
    for (double& v : wv) v -= decay * v;
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  auto& m = state.first_moment.values();
  auto& v = state.second_moment.values();
  const auto& g = grad.values();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    wv[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  return out;
}

namespace {
constexpr double kDegenerateGradNorm = 1e-12;
}

Perturbation sam_perturbation(const ParamVector& grad, double rho) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("sam_perturbation: rho must be > 0");
  }
  const double norm = param_norm2(grad);
  if (norm <= kDegenerateGradNorm) {
    return Perturbation{ParamVector::zeros_like(grad), true};
  }
  return Perturbation{param_scale(rho / norm, grad), false};
}

SamGradient sam_gradient(const LossGradFn& f, const ParamVector& w, double rho,
                         bool force_zero_perturbation) {
  StepReport report;

  LossGrad at_w = f(w);
  report.grad_evals = 1;
  report.loss_w = at_w.loss;

  Perturbation pert =
      force_zero_perturbation
          ? Perturbation{ParamVector::zeros_like(at_w.grad), true}
          : sam_perturbation(at_w.grad, rho);
  report.degenerate = pert.degenerate;
  report.eps_norm = param_norm2(pert.eps);

  // Evaluate at w + eps and discard the perturbed point afterwards. The
  // degenerate fallback evaluates at w itself, so the step reduces to the
  // plain base update on this batch.
  ParamVector perturbed = param_axpy(1.0, pert.eps, w);
  LossGrad at_perturbed = f(perturbed);
  report.grad_evals += 1;
  report.loss_w_plus_eps = at_perturbed.loss;

  return SamGradient{std::move(at_perturbed.grad), report};
}

std::pair<ParamVector, StepReport> sam_step(const MlpModel& model,
                                            const Batch& batch,
                                            AdamState& state,
                                            const SamConfig& cfg,
                                            std::size_t step,
                                            const ClassWeights& weights) {
  cfg.validate();
  LossGradFn f = [&](const ParamVector& p) {
    return loss_and_grad(model.with_params(p), batch, weights);
  };
  SamGradient sg =
      sam_gradient(f, model.params, cfg.rho, cfg.force_zero_perturbation);
  sg.report.step = step;
  sg.report.lr = cosine_lr(cfg.base, step);
  ParamVector next = adam_step(state, cfg.base, model.params, sg.grad, step);
  return {std::move(next), sg.report};
}

}  // namespace sharpbench
