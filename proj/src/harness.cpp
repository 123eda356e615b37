#include "sharpbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sharpbench/checkpoint.hpp"
#include "sharpbench/rng.hpp"

#include "nlohmann/json.hpp"

namespace sharpbench {

namespace {

constexpr std::uint64_t kModelInitStream = 0x300;
constexpr std::uint64_t kEpochShuffleStream = 0x301;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string rho_tag(double rho) {
  // Compact tag for ids: trailing zeros trimmed.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", rho);
  return buf;
}

std::string system_name(OptimizerKind kind, double rho) {
  if (kind == OptimizerKind::kAdam) return "adam";
  return "sam-rho" + rho_tag(rho);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

void ensure_dir(const std::string& path) {
  std::filesystem::create_directories(path);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string run_result_payload_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["system"] = r.system;
  j["optimizer"] = r.optimizer;
  j["rho"] = r.rho;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["eer"] = r.eer;
  j["sharpness"] = r.sharpness;
  j["final_train_loss"] = r.final_train_loss;
  j["checkpoint"] = r.checkpoint_path;
  j["train_log"] = r.train_log_path;
  return j.dump(2);
}

std::string run_result_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["payload"] = nlohmann::ordered_json::parse(run_result_payload_json(r));
  j["meta"] = {{"wall_seconds", r.wall_seconds}};
  return j.dump(2);
}

RunResult run_result_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto& p = j.at("payload");
  RunResult r;
  r.run_id = p.at("run_id");
  r.system = p.at("system");
  r.optimizer = p.at("optimizer");
  r.rho = p.at("rho");
  r.seed = p.at("seed");
  r.config_hash = p.at("config_hash");
  r.eer = p.at("eer").get<std::map<std::string, double>>();
  r.sharpness = p.at("sharpness").get<std::map<std::string, double>>();
  r.final_train_loss = p.at("final_train_loss");
  r.checkpoint_path = p.at("checkpoint");
  r.train_log_path = p.at("train_log");
  r.wall_seconds = j.at("meta").at("wall_seconds");
  return r;
}

MlpModel train_model(const ExperimentConfig& cfg, std::uint64_t seed,
                     const Dataset& train, std::vector<StepLogRow>* log) {
  cfg.validate();
  MlpModel model = MlpModel::init(cfg.layer_dims(), cfg.activation,
                                  mix_seed(seed, kModelInitStream));

  const std::size_t steps_per_epoch =
      (train.size() + cfg.batch_size - 1) / cfg.batch_size;
  AdamConfig adam = cfg.adam;
  adam.total_steps = std::max<std::size_t>(1, cfg.epochs * steps_per_epoch);

  SamConfig sam;
  sam.rho = cfg.rho;
  sam.base = adam;
  sam.force_zero_perturbation = cfg.force_zero_perturbation;

  AdamState state = AdamState::init(model.params);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = train.shuffled_batches(
        cfg.batch_size, mix_seed(seed, kEpochShuffleStream, epoch));
    for (std::size_t b = 0; b < batches.size(); ++b) {
      StepLogRow row;
      row.step = step;
      if (cfg.optimizer == OptimizerKind::kSam) {
        auto [next, report] =
            sam_step(model, batches[b], state, sam, step, cfg.class_weights);
        row.lr = report.lr;
        row.loss_w = report.loss_w;
        row.loss_w_plus_eps = report.loss_w_plus_eps;
        row.eps_norm = report.eps_norm;
        row.degenerate = report.degenerate;
        model.params = std::move(next);
      } else {
        LossGrad lg = loss_and_grad(model, batches[b], cfg.class_weights);
        row.lr = cosine_lr(adam, step);
        row.loss_w = lg.loss;
        row.loss_w_plus_eps = lg.loss;
        row.eps_norm = 0.0;
        row.degenerate = false;
        model.params = adam_step(state, adam, model.params, lg.grad, step);
      }
      if (!std::isfinite(row.loss_w) || !std::isfinite(row.loss_w_plus_eps)) {
        throw NumericalError("training diverged: non-finite loss at step " +
                             std::to_string(step) + ", lr " + fmt(row.lr) +
                             ", batch " + std::to_string(b));
      }
      if (log) log->push_back(row);
      ++step;
    }
  }
  return model;
}

ScoreSet score_dataset(const MlpModel& model, const Dataset& ds) {
  ScoreSet scores;
  for (const Batch& b : ds.batches(512)) {
    const Tensor logits = forward(model, b.features);
    if (!logits.all_finite()) {
      throw NumericalError("score_dataset: non-finite logits");
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      // Score = bona logit minus spoof logit; higher means more bona fide.
      const double s = logits.at(i, 0) - logits.at(i, 1);
      (b.labels[i] == kBonaFide ? scores.bona : scores.spoof).push_back(s);
    }
  }
  return scores;
}

EerResult evaluate_eer(const MlpModel& model, const Dataset& ds) {
  return compute_eer(score_dataset(model, ds));
}

std::vector<std::pair<std::string, GeneratedDataset>> build_eval_suite(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, GeneratedDataset>> suite;
  GeneratedDataset matched = generate_matched_eval(cfg.task);
  suite.emplace_back("matched", std::move(matched));
  for (const ShiftSpec& s : cfg.shifts) {
    GeneratedDataset gd = generate_shifted_test(cfg.task, s);
    suite.emplace_back(gd.provenance.name, std::move(gd));
  }
  return suite;
}

namespace {

RunResult run_one(const ExperimentConfig& cfg, std::uint64_t seed,
                  bool persist) {
  const auto t0 = std::chrono::steady_clock::now();

  RunResult r;
  r.optimizer = to_string(cfg.optimizer);
  r.rho = cfg.optimizer == OptimizerKind::kSam ? cfg.rho : 0.0;
  r.seed = seed;
  r.config_hash = config_hash(cfg);
  r.system = system_name(cfg.optimizer, cfg.rho);
  r.run_id = r.config_hash.substr(0, 8) + "-" + r.system + "-s" +
             std::to_string(seed);

  GeneratedDataset train = generate_train(cfg.task);
  std::vector<StepLogRow> log;
  MlpModel model = train_model(cfg, seed, train.data, &log);
  r.final_train_loss = log.empty() ? dataset_loss(model, train.data,
                                                  cfg.class_weights)
                                   : log.back().loss_w;

  SharpnessConfig sharp = cfg.sharpness;
  sharp.class_weights = cfg.class_weights;
  for (const auto& [name, gd] : build_eval_suite(cfg)) {
    r.eer[name] = evaluate_eer(model, gd.data).eer;
    r.sharpness[name] =
        dataset_sharpness(model, gd.data, sharp, r.run_id, name).mean;
  }

  if (persist) {
    const std::string run_dir = cfg.output_dir + "/runs/" + r.run_id;
    ensure_dir(run_dir);
    r.checkpoint_path = run_dir + "/checkpoint.txt";
    save_checkpoint(model, r.checkpoint_path);

    std::ostringstream log_csv;
    log_csv << "step,lr,loss_w,loss_w_plus_eps,eps_norm,degenerate_flag\n";
    for (const auto& row : log) {
      log_csv << row.step << "," << fmt(row.lr) << "," << fmt(row.loss_w)
              << "," << fmt(row.loss_w_plus_eps) << "," << fmt(row.eps_norm)
              << "," << (row.degenerate ? 1 : 0) << "\n";
    }
    r.train_log_path = run_dir + "/train_log.csv";
    write_file_atomic(r.train_log_path, log_csv.str());

    const auto t1 = std::chrono::steady_clock::now();
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    write_file_atomic(run_dir + "/result.json", run_result_json(r) + "\n");
  } else {
    const auto t1 = std::chrono::steady_clock::now();
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  }
  return r;
}

}  // namespace

RunResult cmd_train(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_one(cfg, seed, true);
}

void write_results_csv(const std::vector<RunResult>& runs,
                       const std::string& path) {
  std::ostringstream out;
  out << "run_id,system,optimizer,rho,seed,test_set,eer,sharpness_mean,"
         "checkpoint\n";
  for (const RunResult& r : runs) {
    for (const auto& [set, eer] : r.eer) {
      out << r.run_id << "," << r.system << "," << r.optimizer << ","
          << fmt(r.rho) << "," << r.seed << "," << set << "," << fmt(eer)
          << "," << fmt(r.sharpness.at(set)) << "," << r.checkpoint_path
          << "\n";
    }
  }
  write_file_atomic(path, out.str());
}

std::vector<RunResult> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results csv");

  std::map<std::string, RunResult> by_id;
  std::vector<std::string> id_order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 8) {
      throw std::runtime_error("results csv: malformed row: " + line);
    }
    RunResult& r = by_id[cells[0]];
    if (r.run_id.empty()) {
      r.run_id = cells[0];
      r.system = cells[1];
      r.optimizer = cells[2];
      r.rho = std::stod(cells[3]);
      r.seed = std::stoull(cells[4]);
      if (cells.size() > 8) r.checkpoint_path = cells[8];
      id_order.push_back(r.run_id);
    }
    r.eer[cells[5]] = std::stod(cells[6]);
    r.sharpness[cells[5]] = std::stod(cells[7]);
  }
  std::vector<RunResult> runs;
  for (const auto& id : id_order) runs.push_back(by_id.at(id));
  return runs;
}

namespace {

void aggregate_cells(
    const std::vector<RunResult>& runs,
    std::map<std::string, std::map<std::string, TableCell>>& eer_cells,
    std::map<std::string, std::map<std::string, TableCell>>& sharp_cells) {
  std::map<std::string, std::map<std::string, std::vector<double>>> eers;
  std::map<std::string, std::map<std::string, std::vector<double>>> sharps;
  for (const RunResult& r : runs) {
    for (const auto& [set, v] : r.eer) eers[r.system][set].push_back(v);
    for (const auto& [set, v] : r.sharpness) {
      sharps[r.system][set].push_back(v);
    }
  }
  for (const auto& [system, sets] : eers) {
    for (const auto& [set, values] : sets) {
      TableCell cell;
      cell.mean = mean_of(values);
      cell.stddev = sample_std(values, cell.mean);
      eer_cells[system][set] = cell;
    }
  }
  for (const auto& [system, sets] : sharps) {
    for (const auto& [set, values] : sets) {
      TableCell cell;
      cell.mean = mean_of(values);
      cell.stddev = sample_std(values, cell.mean);
      sharp_cells[system][set] = cell;
    }
  }
  // Bold-winner flags: lower mean EER (and lower mean sharpness) per set.
  for (auto& [system, sets] : eer_cells) {
    for (auto& [set, cell] : sets) {
      bool winner = true;
      for (const auto& [other_system, other_sets] : eer_cells) {
        if (other_system == system) continue;
        const auto it = other_sets.find(set);
        if (it != other_sets.end() && it->second.mean < cell.mean) {
          winner = false;
        }
      }
      cell.winner = winner;
    }
  }
  for (auto& [system, sets] : sharp_cells) {
    for (auto& [set, cell] : sets) {
      bool winner = true;
      for (const auto& [other_system, other_sets] : sharp_cells) {
        if (other_system == system) continue;
        const auto it = other_sets.find(set);
        if (it != other_sets.end() && it->second.mean < cell.mean) {
          winner = false;
        }
      }
      cell.winner = winner;
    }
  }
}

nlohmann::ordered_json cells_to_json(
    const std::map<std::string, std::map<std::string, TableCell>>& cells) {
  nlohmann::ordered_json j;
  for (const auto& [system, sets] : cells) {
    for (const auto& [set, cell] : sets) {
      j[system][set] = {{"mean", cell.mean},
                        {"stddev", cell.stddev},
                        {"winner", cell.winner}};
    }
  }
  return j;
}

}  // namespace

ResultsTable cmd_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.output_dir);

  ResultsTable table;
  for (OptimizerKind kind : {OptimizerKind::kAdam, OptimizerKind::kSam}) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.optimizer = kind;
    for (std::uint64_t seed : cfg.seeds) {
      table.runs.push_back(cmd_train(run_cfg, seed));
    }
  }
  aggregate_cells(table.runs, table.eer_cells, table.sharpness_cells);

  write_results_csv(table.runs, cfg.output_dir + "/results.csv");

  nlohmann::ordered_json tj;
  tj["eer"] = cells_to_json(table.eer_cells);
  tj["sharpness"] = cells_to_json(table.sharpness_cells);
  write_file_atomic(cfg.output_dir + "/results_table.json", tj.dump(2) + "\n");

  // Mismatch curves: sharpness vs level per axis, aggregated over seeds,
  // one CSV per optimizer. Models are reloaded from the checkpoints the
  // training runs above just wrote (the round-trip is bit-exact).
  if (!cfg.curves.empty()) {
    for (OptimizerKind kind : {OptimizerKind::kAdam, OptimizerKind::kSam}) {
      std::vector<MlpModel> models;
      for (const RunResult& r : table.runs) {
        if (r.optimizer == to_string(kind)) {
          models.push_back(load_checkpoint(r.checkpoint_path));
        }
      }
      SharpnessConfig sharp = cfg.sharpness;
      sharp.class_weights = cfg.class_weights;
      std::ostringstream out;
      out << "axis,level,sharpness_mean,sharpness_std\n";
      for (const auto& curve : cfg.curves) {
        for (int level : curve.levels) {
          GeneratedDataset gd = generate_shifted_test(
              cfg.task, cfg.make_shift(curve.axis, level));
          std::vector<double> values;
          for (const MlpModel& model : models) {
            values.push_back(dataset_sharpness(model, gd.data, sharp).mean);
          }
          const double mean = mean_of(values);
          out << to_string(curve.axis) << "," << level << "," << fmt(mean)
              << "," << fmt(sample_std(values, mean)) << "\n";
        }
      }
      write_file_atomic(
          cfg.output_dir + "/mismatch_" + to_string(kind) + ".csv",
          out.str());
    }
  }
  return table;
}

std::map<std::string, double> cmd_evaluate(
    const std::string& checkpoint_path,
    const std::vector<std::string>& dataset_csvs) {
  const MlpModel model = load_checkpoint(checkpoint_path);
  std::map<std::string, double> out;
  for (const std::string& path : dataset_csvs) {
    out[path] = evaluate_eer(model, read_dataset_csv(path)).eer;
  }
  return out;
}

CorrelateOutput cmd_correlate(const std::string& results_csv,
                              const std::string& out_dir) {
  const std::vector<RunResult> runs = read_results_csv(results_csv);
  if (runs.empty()) throw std::runtime_error("correlate: no runs in " + results_csv);
  ensure_dir(out_dir);

  // Collect test set names (sorted for deterministic output).
  std::vector<std::string> sets;
  for (const auto& [set, v] : runs.front().eer) sets.push_back(set);

  CorrelateOutput out;
  std::ostringstream scatter;
  scatter << "sharpness,eer,optimizer,system,test_set\n";
  for (const std::string& set : sets) {
    std::vector<SystemPoint> points;
    for (const RunResult& r : runs) {
      const auto eit = r.eer.find(set);
      const auto sit = r.sharpness.find(set);
      if (eit == r.eer.end() || sit == r.sharpness.end()) continue;
      points.push_back(SystemPoint{sit->second, eit->second,
                                   r.run_id, r.optimizer});
      scatter << fmt(sit->second) << "," << fmt(eit->second) << ","
              << r.optimizer << "," << r.run_id << "," << set << "\n";
    }
    out.per_set[set] = correlate_systems(points);
    write_file_atomic(out_dir + "/correlation_" + set + ".json",
                      correlation_report_json(out.per_set[set]) + "\n");
  }
  write_file_atomic(out_dir + "/scatter.csv", scatter.str());

  // Table-2 style grid: one row per metric, one column pair per test set,
  // flags: ** p <= 0.01, * p <= 0.05.
  std::ostringstream grid;
  grid << "metric";
  for (const std::string& set : sets) grid << "," << set << "," << set << "_sig";
  grid << "\n";
  auto sig = [](double p) {
    if (p <= 0.01) return "**";
    if (p <= 0.05) return "*";
    return "";
  };
  auto row = [&](const char* name, auto coef, auto pval) {
    grid << name;
    for (const std::string& set : sets) {
      const CorrelationReport& rep = out.per_set.at(set);
      grid << "," << fmt(coef(rep)) << "," << sig(pval(rep));
    }
    grid << "\n";
  };
  row("PCC", [](const CorrelationReport& r) { return r.pcc; },
      [](const CorrelationReport& r) { return r.p_pcc; });
  row("SRCC", [](const CorrelationReport& r) { return r.srcc; },
      [](const CorrelationReport& r) { return r.p_srcc; });
  row("KTAU", [](const CorrelationReport& r) { return r.ktau; },
      [](const CorrelationReport& r) { return r.p_ktau; });
  write_file_atomic(out_dir + "/correlation_table.csv", grid.str());
  return out;
}

RhoSweepResult cmd_rho_sweep(const ExperimentConfig& cfg,
                             const std::vector<double>& rhos) {
  if (rhos.empty()) throw std::invalid_argument("rho-sweep: empty rho list");
  RhoSweepResult result;
  for (double rho : rhos) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.optimizer = OptimizerKind::kSam;
    run_cfg.rho = rho;
    RhoSweepEntry entry;
    entry.rho = rho;
    std::vector<double> matched;
    for (std::uint64_t seed : cfg.seeds) {
      RunResult r = cmd_train(run_cfg, seed);
      matched.push_back(r.eer.at("matched"));
      entry.runs.push_back(std::move(r));
    }
    entry.mean_matched_eer = mean_of(matched);
    result.entries.push_back(std::move(entry));
  }
  result.chosen_rho =
      std::min_element(result.entries.begin(), result.entries.end(),
                       [](const RhoSweepEntry& a, const RhoSweepEntry& b) {
                         return a.mean_matched_eer < b.mean_matched_eer;
                       })
          ->rho;

  nlohmann::ordered_json j;
  nlohmann::ordered_json entries = nlohmann::json::array();
  for (const auto& e : result.entries) {
    nlohmann::ordered_json runs = nlohmann::json::array();
    for (const auto& r : e.runs) runs.push_back(r.run_id);
    entries.push_back({{"rho", e.rho},
                       {"mean_matched_eer", e.mean_matched_eer},
                       {"runs", runs}});
  }
  j["entries"] = std::move(entries);
  j["chosen_rho"] = result.chosen_rho;
  ensure_dir(cfg.output_dir);
  write_file_atomic(cfg.output_dir + "/rho_sweep.json", j.dump(2) + "\n");
  return result;
}

}  // namespace sharpbench
