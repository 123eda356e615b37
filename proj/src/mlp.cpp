#include "sharpbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sharpbench/rng.hpp"

namespace sharpbench {

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

void ClassWeights::validate() const {
  if (!(bona > 0.0) || !(spoof > 0.0)) {
    throw std::invalid_argument("class weights must be positive");
  }
}

namespace {

void validate_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) {
    throw std::invalid_argument("MlpModel: need at least input and output dims");
  }
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("MlpModel: zero layer dimension");
  }
  if (dims.back() != 2) {
    throw std::invalid_argument("MlpModel: output dimension must be 2, got " +
                                std::to_string(dims.back()));
  }
}

double act_apply(Activation a, double z) {
  if (a == Activation::kRelu) return z > 0.0 ? z : 0.0;
  return std::tanh(z);
}

// Derivative expressed in the activation output `y` (cheaper for tanh and
// exact for relu away from the kink).
double act_deriv_from_output(Activation a, double y) {
  if (a == Activation::kRelu) return y > 0.0 ? 1.0 : 0.0;
  return 1.0 - y * y;
}

}  // namespace

ParamVector MlpModel::make_layout(const std::vector<std::size_t>& layer_dims) {
  validate_dims(layer_dims);
  std::vector<LayoutEntry> layout;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t in = layer_dims[l];
    const std::size_t out = layer_dims[l + 1];
    layout.push_back({"layer" + std::to_string(l) + ".weight", {out, in},
                      offset, out * in});
    offset += out * in;
    layout.push_back(
        {"layer" + std::to_string(l) + ".bias", {out}, offset, out});
    offset += out;
  }
  return ParamVector(std::move(layout), std::vector<double>(offset, 0.0));
}

MlpModel MlpModel::init(std::vector<std::size_t> layer_dims,
                        Activation activation, std::uint64_t seed) {
  ParamVector params = make_layout(layer_dims);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const double fan_in = static_cast<double>(layer_dims[l]);
    const double fan_out = static_cast<double>(layer_dims[l + 1]);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    auto w = params.block(2 * l);  // weight block; bias stays zero
    for (double& v : w) v = rng.uniform(-bound, bound);
  }
  return MlpModel{std::move(layer_dims), activation, std::move(params)};
}

MlpModel MlpModel::with_params(ParamVector p) const {
  if (!p.same_layout(params)) {
    throw std::invalid_argument("with_params: layout mismatch");
  }
  return MlpModel{layer_dims, activation, std::move(p)};
}

namespace {

// Shared forward pass; optionally records post-activation values per layer
// (index 0 = input features) for the backward pass.
Tensor forward_impl(const MlpModel& model, const Tensor& features,
                    std::vector<Tensor>* activations) {
  if (features.shape.size() != 2) {
    throw std::invalid_argument("forward: features must be 2-D");
  }
  if (features.cols() != model.input_dim()) {
    throw std::invalid_argument(
        "forward: layer0 expects input dim " +
        std::to_string(model.input_dim()) + ", got " +
        std::to_string(features.cols()));
  }
  const std::size_t m = features.rows();
  Tensor cur = features;
  if (activations) activations->push_back(cur);
  for (std::size_t l = 0; l < model.num_affine_layers(); ++l) {
    const std::size_t in = model.layer_dims[l];
    const std::size_t out = model.layer_dims[l + 1];
    auto w = model.params.block(2 * l);
    auto b = model.params.block(2 * l + 1);
    Tensor next = Tensor::zeros({m, out});
    const bool is_last = (l + 1 == model.num_affine_layers());
    for (std::size_t i = 0; i < m; ++i) {
      const double* x = &cur.data[i * in];
      for (std::size_t o = 0; o < out; ++o) {
        const double* wrow = &w[o * in];
        double z = b[o];
        for (std::size_t j = 0; j < in; ++j) z += wrow[j] * x[j];
        next.at(i, o) = is_last ? z : act_apply(model.activation, z);
      }
    }
    cur = std::move(next);
    if (activations) activations->push_back(cur);
  }
  return cur;
}

}  // namespace

Tensor forward(const MlpModel& model, const Tensor& features) {
  return forward_impl(model, features, nullptr);
}

WceResult weighted_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels,
                                 const ClassWeights& weights) {
  weights.validate();
  if (labels.empty()) {
    throw std::invalid_argument("weighted_cross_entropy: empty batch");
  }
  if (logits.shape.size() != 2 || logits.cols() != 2 ||
      logits.rows() != labels.size()) {
    throw std::invalid_argument(
        "weighted_cross_entropy: logits must be (m, 2) matching labels");
  }
  logits.require_finite("weighted_cross_entropy logits");

  WceResult res;
  res.per_example.resize(labels.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double a = logits.at(i, 0);
    const double b = logits.at(i, 1);
    // log softmax via log-sum-exp: lse = max + log(exp(a-max)+exp(b-max))
    const double mx = std::max(a, b);
    const double lse = mx + std::log(std::exp(a - mx) + std::exp(b - mx));
    const double target = labels[i] == kBonaFide ? a : b;
    const double nll = lse - target;
    const double v = weights.of(labels[i]) * nll;
    res.per_example[i] = v;
    sum += v;
  }
  res.mean_loss = sum / static_cast<double>(labels.size());
  return res;
}

LossGrad loss_and_grad(const MlpModel& model, const Batch& batch,
                       const ClassWeights& weights) {
  std::vector<Tensor> acts;
  Tensor logits = forward_impl(model, batch.features, &acts);
  WceResult wce = weighted_cross_entropy(logits, batch.labels, weights);

  const std::size_t m = batch.size();
  const double inv_m = 1.0 / static_cast<double>(m);

  // d(mean loss)/d(logits): weight[y_i] * (softmax - onehot) / m.
  Tensor delta = Tensor::zeros({m, 2});
  for (std::size_t i = 0; i < m; ++i) {
    const double a = logits.at(i, 0);
    const double b = logits.at(i, 1);
    const double mx = std::max(a, b);
    const double ea = std::exp(a - mx);
    const double eb = std::exp(b - mx);
    const double denom = ea + eb;
    const double p0 = ea / denom;
    const double p1 = eb / denom;
    const double cw = weights.of(batch.labels[i]) * inv_m;
    delta.at(i, 0) = cw * (p0 - (batch.labels[i] == kBonaFide ? 1.0 : 0.0));
    delta.at(i, 1) = cw * (p1 - (batch.labels[i] == kSpoof ? 1.0 : 0.0));
  }

  ParamVector grad = ParamVector::zeros_like(model.params);
  // Backward through affine layers; delta holds dL/dz of the current layer.
  for (std::size_t l = model.num_affine_layers(); l-- > 0;) {
    const std::size_t in = model.layer_dims[l];
    const std::size_t out = model.layer_dims[l + 1];
    const Tensor& input = acts[l];  // post-activation of previous layer
    auto gw = grad.block(2 * l);
    auto gb = grad.block(2 * l + 1);
    for (std::size_t i = 0; i < m; ++i) {
      const double* x = &input.data[i * in];
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta.at(i, o);
        gb[o] += d;
        double* gwrow = &gw[o * in];
        for (std::size_t j = 0; j < in; ++j) gwrow[j] += d * x[j];
      }
    }
    if (l == 0) break;
    // Propagate to the previous layer's pre-activation.
    auto w = model.params.block(2 * l);
    Tensor prev_delta = Tensor::zeros({m, in});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < in; ++j) {
        double acc = 0.0;
        for (std::size_t o = 0; o < out; ++o) {
          acc += delta.at(i, o) * w[o * in + j];
        }
        acc *= act_deriv_from_output(model.activation, input.at(i, j));
        prev_delta.at(i, j) = acc;
      }
    }
    delta = std::move(prev_delta);
  }

  return LossGrad{wce.mean_loss, std::move(grad)};
}

double batch_loss(const MlpModel& model, const Batch& batch,
                  const ClassWeights& weights) {
  Tensor logits = forward(model, batch.features);
  return weighted_cross_entropy(logits, batch.labels, weights).mean_loss;
}

double dataset_loss(const MlpModel& model, const Dataset& ds,
                    const ClassWeights& weights) {
  if (ds.size() == 0) throw std::invalid_argument("dataset_loss: empty dataset");
  // Chunked evaluation; the running sum over per-example losses keeps the
  // result independent of the chunk size only up to rounding, so the chunk
  // size is fixed here rather than configurable.
  constexpr std::size_t kChunk = 512;
  double sum = 0.0;
  std::size_t n = 0;
  for (const Batch& b : ds.batches(kChunk)) {
    Tensor logits = forward(model, b.features);
    WceResult wce = weighted_cross_entropy(logits, b.labels, weights);
    for (double v : wce.per_example) sum += v;
    n += b.size();
  }
  return sum / static_cast<double>(n);
}

}  // namespace sharpbench
