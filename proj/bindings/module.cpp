// Python bindings for the core operations: model/loss/gradients, Adam/SAM
// steps, sharpness, landscape grids, EER and the correlation battery, plus
// the synthetic task generator.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sharpbench/checkpoint.hpp"
#include "sharpbench/config.hpp"
#include "sharpbench/correlation.hpp"
#include "sharpbench/eer.hpp"
#include "sharpbench/harness.hpp"
#include "sharpbench/landscape.hpp"
#include "sharpbench/sharpness.hpp"
#include "sharpbench/synthbench.hpp"

namespace py = pybind11;
using namespace sharpbench;

namespace {

Tensor tensor_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty feature matrix");
  const std::size_t d = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (const auto& row : rows) {
    if (row.size() != d) throw std::invalid_argument("ragged feature matrix");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({rows.size(), d}, std::move(data));
}

std::vector<std::vector<double>> tensor_to_rows(const Tensor& t) {
  std::vector<std::vector<double>> rows(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    rows[i].assign(t.data.begin() + i * t.cols(),
                   t.data.begin() + (i + 1) * t.cols());
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sharpness / SAM / EER toolkit core";

  py::class_<ClassWeights>(m, "ClassWeights")
      .def(py::init<>())
      .def(py::init([](double bona, double spoof) {
             ClassWeights w{bona, spoof};
             w.validate();
             return w;
           }),
           py::arg("bona") = 0.9, py::arg("spoof") = 0.1)
      .def_readwrite("bona", &ClassWeights::bona)
      .def_readwrite("spoof", &ClassWeights::spoof);

  py::class_<Batch>(m, "Batch")
      .def(py::init([](const std::vector<std::vector<double>>& features,
                       const std::vector<int>& labels) {
             return Batch(tensor_from_rows(features), labels);
           }),
           py::arg("features"), py::arg("labels"))
      .def_property_readonly("size", &Batch::size);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const std::vector<std::vector<double>>& features,
                       const std::vector<int>& labels) {
             return Dataset(tensor_from_rows(features), labels);
           }),
           py::arg("features"), py::arg("labels"))
      .def("__len__", &Dataset::size)
      .def_property_readonly("feature_dim", &Dataset::feature_dim)
      .def_property_readonly(
          "features",
          [](const Dataset& ds) { return tensor_to_rows(ds.features()); })
      .def_property_readonly("labels",
                             [](const Dataset& ds) { return ds.labels(); });

  m.def("read_dataset_csv", &read_dataset_csv, py::arg("path"));
  m.def("write_dataset_csv", &write_dataset_csv, py::arg("dataset"),
        py::arg("path"));

  py::class_<MlpModel>(m, "MlpModel")
      .def_static(
          "init",
          [](const std::vector<std::size_t>& layer_dims,
             const std::string& activation, std::uint64_t seed) {
            return MlpModel::init(layer_dims,
                                  activation_from_string(activation), seed);
          },
          py::arg("layer_dims"), py::arg("activation") = "relu",
          py::arg("seed") = 0)
      .def_property_readonly(
          "layer_dims", [](const MlpModel& m_) { return m_.layer_dims; })
      .def_property_readonly(
          "activation",
          [](const MlpModel& m_) { return to_string(m_.activation); })
      .def_property(
          "param_values",
          [](const MlpModel& m_) { return m_.params.values(); },
          [](MlpModel& m_, const std::vector<double>& v) {
            if (v.size() != m_.params.size()) {
              throw std::invalid_argument("parameter count mismatch");
            }
            m_.params.values() = v;
          });

  m.def(
      "forward",
      [](const MlpModel& model, const std::vector<std::vector<double>>& x) {
        return tensor_to_rows(forward(model, tensor_from_rows(x)));
      },
      py::arg("model"), py::arg("features"));

  m.def(
      "weighted_cross_entropy",
      [](const std::vector<std::vector<double>>& logits,
         const std::vector<int>& labels, const ClassWeights& weights) {
        WceResult r =
            weighted_cross_entropy(tensor_from_rows(logits), labels, weights);
        return py::make_tuple(r.mean_loss, r.per_example);
      },
      py::arg("logits"), py::arg("labels"),
      py::arg("class_weights") = ClassWeights{});

  m.def(
      "loss_and_grad",
      [](const MlpModel& model, const Batch& batch,
         const ClassWeights& weights) {
        LossGrad lg = loss_and_grad(model, batch, weights);
        return py::make_tuple(lg.loss, lg.grad.values());
      },
      py::arg("model"), py::arg("batch"),
      py::arg("class_weights") = ClassWeights{});

  m.def("batch_loss", &batch_loss, py::arg("model"), py::arg("batch"),
        py::arg("class_weights") = ClassWeights{});
  m.def("dataset_loss", &dataset_loss, py::arg("model"), py::arg("dataset"),
        py::arg("class_weights") = ClassWeights{});

  m.def("save_checkpoint", &save_checkpoint, py::arg("model"),
        py::arg("path"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  // Optimizers.
  py::class_<AdamConfig>(m, "AdamConfig")
      .def(py::init<>())
      .def_readwrite("lr_max", &AdamConfig::lr_max)
      .def_readwrite("lr_min", &AdamConfig::lr_min)
      .def_readwrite("total_steps", &AdamConfig::total_steps)
      .def_readwrite("beta1", &AdamConfig::beta1)
      .def_readwrite("beta2", &AdamConfig::beta2)
      .def_readwrite("eps", &AdamConfig::eps)
      .def_readwrite("weight_decay", &AdamConfig::weight_decay);

  m.def("cosine_lr", &cosine_lr, py::arg("config"), py::arg("step"));

  py::class_<StepReport>(m, "StepReport")
      .def_readonly("step", &StepReport::step)
      .def_readonly("lr", &StepReport::lr)
      .def_readonly("loss_w", &StepReport::loss_w)
      .def_readonly("loss_w_plus_eps", &StepReport::loss_w_plus_eps)
      .def_readonly("eps_norm", &StepReport::eps_norm)
      .def_readonly("degenerate", &StepReport::degenerate)
      .def_readonly("grad_evals", &StepReport::grad_evals);

  // One optimization step over a batch; returns the updated model plus the
  // step report. State is kept inside the closure-friendly Trainer below
  // for multi-step use; the single-step form is enough for smoke tests.
  py::class_<SamConfig>(m, "SamConfig")
      .def(py::init<>())
      .def_readwrite("rho", &SamConfig::rho)
      .def_readwrite("base", &SamConfig::base)
      .def_readwrite("force_zero_perturbation",
                     &SamConfig::force_zero_perturbation);

  py::class_<AdamState>(m, "AdamState")
      .def_static("init",
                  [](const MlpModel& model) {
                    return AdamState::init(model.params);
                  })
      .def_readonly("step_count", &AdamState::step_count);

  m.def(
      "adam_step",
      [](AdamState& state, const AdamConfig& cfg, MlpModel model,
         const Batch& batch, std::size_t step, const ClassWeights& weights) {
        LossGrad lg = loss_and_grad(model, batch, weights);
        model.params = adam_step(state, cfg, model.params, lg.grad, step);
        return py::make_tuple(model, lg.loss);
      },
      py::arg("state"), py::arg("config"), py::arg("model"), py::arg("batch"),
      py::arg("step"), py::arg("class_weights") = ClassWeights{});

  m.def(
      "sam_step",
      [](MlpModel model, const Batch& batch, AdamState& state,
         const SamConfig& cfg, std::size_t step, const ClassWeights& weights) {
        auto [next, report] = sam_step(model, batch, state, cfg, step, weights);
        model.params = std::move(next);
        return py::make_tuple(model, report);
      },
      py::arg("model"), py::arg("batch"), py::arg("state"), py::arg("config"),
      py::arg("step"), py::arg("class_weights") = ClassWeights{});

  // Sharpness.
  py::class_<SharpnessConfig>(m, "SharpnessConfig")
      .def(py::init<>())
      .def_readwrite("rho", &SharpnessConfig::rho)
      .def_readwrite("batch_size", &SharpnessConfig::batch_size)
      .def_readwrite("ascent_steps", &SharpnessConfig::ascent_steps)
      .def_readwrite("ascent_lr", &SharpnessConfig::ascent_lr)
      .def_readwrite("restarts", &SharpnessConfig::restarts)
      .def_readwrite("seed", &SharpnessConfig::seed)
      .def_readwrite("class_weights", &SharpnessConfig::class_weights);

  py::class_<SharpnessReport>(m, "SharpnessReport")
      .def_readonly("per_batch", &SharpnessReport::per_batch)
      .def_readonly("mean", &SharpnessReport::mean)
      .def_readonly("stddev", &SharpnessReport::stddev)
      .def_readonly("model_id", &SharpnessReport::model_id)
      .def_readonly("dataset_id", &SharpnessReport::dataset_id)
      .def_readonly("has_partial_batch", &SharpnessReport::has_partial_batch);

  m.def("batch_sharpness", &batch_sharpness, py::arg("model"),
        py::arg("batch"), py::arg("config") = SharpnessConfig{});
  m.def("dataset_sharpness", &dataset_sharpness, py::arg("model"),
        py::arg("dataset"), py::arg("config") = SharpnessConfig{},
        py::arg("model_id") = "", py::arg("dataset_id") = "");
  m.def("sharpness_report_json", &sharpness_report_json, py::arg("report"));

  // Landscape.
  py::class_<DirectionPair>(m, "DirectionPair")
      .def_property_readonly(
          "d1", [](const DirectionPair& d) { return d.d1.values(); })
      .def_property_readonly(
          "d2", [](const DirectionPair& d) { return d.d2.values(); })
      .def_readonly("seed", &DirectionPair::seed)
      .def_readonly("zeroed_blocks", &DirectionPair::zeroed_blocks);

  py::class_<LandscapeGrid>(m, "LandscapeGrid")
      .def_readonly("alphas", &LandscapeGrid::alphas)
      .def_readonly("betas", &LandscapeGrid::betas)
      .def_readonly("losses", &LandscapeGrid::losses)
      .def_readonly("origin_loss", &LandscapeGrid::origin_loss)
      .def_readonly("overflow_count", &LandscapeGrid::overflow_count);

  m.def(
      "sample_directions",
      [](const MlpModel& model, std::uint64_t seed,
         const std::string& normalization) {
        return sample_directions(model, seed,
                                 direction_norm_from_string(normalization));
      },
      py::arg("model"), py::arg("seed"), py::arg("normalization") = "filter");
  m.def("evaluate_grid", &evaluate_grid, py::arg("model"), py::arg("dataset"),
        py::arg("directions"), py::arg("half_range") = 1.0,
        py::arg("resolution") = 41,
        py::arg("class_weights") = ClassWeights{},
        py::arg("dataset_id") = "");
  m.def("grid_spread", &grid_spread, py::arg("grid"));

  // Metrics.
  py::class_<EerResult>(m, "EerResult")
      .def_readonly("eer", &EerResult::eer)
      .def_readonly("threshold", &EerResult::threshold)
      .def_readonly("n_bona", &EerResult::n_bona)
      .def_readonly("n_spoof", &EerResult::n_spoof);

  m.def(
      "compute_eer",
      [](const std::vector<double>& bona, const std::vector<double>& spoof) {
        return compute_eer(ScoreSet{bona, spoof});
      },
      py::arg("bona_scores"), py::arg("spoof_scores"));

  auto as_pair = [](const CorrelationResult& r) {
    return py::make_tuple(r.coefficient, r.p_value);
  };
  m.def(
      "pearson",
      [as_pair](const std::vector<double>& x, const std::vector<double>& y) {
        return as_pair(pearson(x, y));
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "spearman",
      [as_pair](const std::vector<double>& x, const std::vector<double>& y,
                bool permutation) {
        return as_pair(spearman(x, y,
                                permutation ? SpearmanPValue::kPermutation
                                            : SpearmanPValue::kTApprox));
      },
      py::arg("x"), py::arg("y"), py::arg("permutation") = false);
  m.def(
      "kendall_tau",
      [as_pair](const std::vector<double>& x, const std::vector<double>& y) {
        return as_pair(kendall_tau(x, y));
      },
      py::arg("x"), py::arg("y"));

  // Synthetic tasks.
  py::class_<TaskSpec>(m, "TaskSpec")
      .def(py::init<>())
      .def_readwrite("feature_dim", &TaskSpec::feature_dim)
      .def_readwrite("n_train", &TaskSpec::n_train)
      .def_readwrite("n_eval", &TaskSpec::n_eval)
      .def_readwrite("n_train_attacks", &TaskSpec::n_train_attacks)
      .def_readwrite("class_balance", &TaskSpec::class_balance)
      .def_readwrite("base_seed", &TaskSpec::base_seed);

  py::class_<ShiftSpec>(m, "ShiftSpec")
      .def(py::init([](const std::string& axis, int level) {
             ShiftSpec s;
             s.axis = shift_axis_from_string(axis);
             s.level = level;
             return s;
           }),
           py::arg("axis") = "attack", py::arg("level") = 0)
      .def_property(
          "axis",
          [](const ShiftSpec& s) { return to_string(s.axis); },
          [](ShiftSpec& s, const std::string& a) {
            s.axis = shift_axis_from_string(a);
          })
      .def_readwrite("level", &ShiftSpec::level)
      .def_readwrite("language_magnitude", &ShiftSpec::language_magnitude)
      .def_readwrite("channel_strength", &ShiftSpec::channel_strength)
      .def_readwrite("channel_noise", &ShiftSpec::channel_noise)
      .def_readwrite("speaker_spread", &ShiftSpec::speaker_spread);

  py::class_<GeneratedDataset>(m, "GeneratedDataset")
      .def_property_readonly(
          "data", [](const GeneratedDataset& g) { return g.data; })
      .def_property_readonly(
          "name", [](const GeneratedDataset& g) { return g.provenance.name; })
      .def_property_readonly("cluster_ids",
                             [](const GeneratedDataset& g) {
                               return g.provenance.cluster_ids;
                             });

  m.def("generate_train", &generate_train, py::arg("task"));
  m.def("generate_matched_eval", &generate_matched_eval, py::arg("task"));
  m.def("generate_shifted_test", &generate_shifted_test, py::arg("task"),
        py::arg("shift"));

  // Harness-level helpers.
  m.def(
      "score_dataset",
      [](const MlpModel& model, const Dataset& ds) {
        ScoreSet s = score_dataset(model, ds);
        return py::make_tuple(s.bona, s.spoof);
      },
      py::arg("model"), py::arg("dataset"));
  m.def(
      "evaluate_eer",
      [](const MlpModel& model, const Dataset& ds) {
        return evaluate_eer(model, ds);
      },
      py::arg("model"), py::arg("dataset"));
}
