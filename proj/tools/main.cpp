// sharpbench command line: training, evaluation, sharpness and landscape
// measurement, benchmark matrices and correlation analysis on synthetic
// bona-fide/spoof tasks.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sharpbench/checkpoint.hpp"
#include "sharpbench/config.hpp"
#include "sharpbench/harness.hpp"
#include "sharpbench/landscape.hpp"
#include "sharpbench/sharpness.hpp"
#include "sharpbench/synthbench.hpp"

namespace sb = sharpbench;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int run(int argc, char** argv) {
  CLI::App app{"sharpness, SAM and generalization analysis on synthetic "
               "spoof-detection tasks"};
  app.require_subcommand(1);

  // --- gen-data ---
  auto* gen = app.add_subcommand(
      "gen-data", "generate train/matched/shifted dataset CSVs");
  std::string gen_config;
  std::string gen_out = "data";
  gen->add_option("--config", gen_config, "experiment config file")
      ->required();
  gen->add_option("--out", gen_out, "output directory");

  // --- train ---
  auto* train = app.add_subcommand("train", "train one model per seed");
  std::string train_config;
  std::vector<std::uint64_t> train_seeds;
  train->add_option("--config", train_config, "experiment config file")
      ->required();
  train->add_option("--seed", train_seeds,
                    "seed(s) to run (default: seeds from the config)");

  // --- evaluate ---
  auto* evaluate = app.add_subcommand("evaluate", "EER of a checkpoint");
  std::string eval_checkpoint;
  std::vector<std::string> eval_data;
  evaluate->add_option("--checkpoint", eval_checkpoint, "checkpoint file")
      ->required();
  evaluate->add_option("--data", eval_data, "dataset CSV(s)")->required();

  // --- sharpness ---
  auto* sharp = app.add_subcommand("sharpness", "m-sharpness of a checkpoint");
  std::string sharp_checkpoint, sharp_data;
  std::string sharp_json, sharp_csv;
  sb::SharpnessConfig sharp_cfg;
  sharp->add_option("--checkpoint", sharp_checkpoint, "checkpoint file")
      ->required();
  sharp->add_option("--data", sharp_data, "dataset CSV")->required();
  sharp->add_option("--rho", sharp_cfg.rho, "perturbation bound");
  sharp->add_option("--batch-size", sharp_cfg.batch_size, "batch size m");
  sharp->add_option("--ascent-steps", sharp_cfg.ascent_steps,
                    "projected gradient ascent steps");
  sharp->add_option("--restarts", sharp_cfg.restarts, "ascent restarts");
  sharp->add_option("--seed", sharp_cfg.seed, "estimator seed");
  sharp->add_option("--out-json", sharp_json, "write SharpnessReport JSON");
  sharp->add_option("--out-csv", sharp_csv, "write one-row summary CSV");

  // --- landscape ---
  auto* land = app.add_subcommand(
      "landscape", "2-D loss surface around a checkpoint");
  std::string land_checkpoint, land_data, land_csv, land_json;
  double land_half_range = 1.0;
  std::size_t land_resolution = 41;
  std::uint64_t land_seed = 1;
  std::string land_norm = "filter";
  land->add_option("--checkpoint", land_checkpoint, "checkpoint file")
      ->required();
  land->add_option("--data", land_data, "dataset CSV")->required();
  land->add_option("--half-range", land_half_range, "coordinate half range");
  land->add_option("--resolution", land_resolution, "grid resolution (odd)");
  land->add_option("--seed", land_seed, "direction seed");
  land->add_option("--normalization", land_norm, "filter|global|none");
  land->add_option("--out-csv", land_csv, "long-format CSV (alpha,beta,loss)");
  land->add_option("--out-json", land_json, "grid JSON");

  // --- benchmark ---
  auto* bench = app.add_subcommand(
      "benchmark", "Adam vs SAM across seeds, tables and mismatch curves");
  std::string bench_config;
  bench->add_option("--config", bench_config, "experiment config file")
      ->required();

  // --- correlate ---
  auto* corr = app.add_subcommand(
      "correlate", "sharpness vs EER correlation over a results.csv");
  std::string corr_results, corr_out = "correlate";
  corr->add_option("--results", corr_results, "results.csv from benchmark")
      ->required();
  corr->add_option("--out", corr_out, "output directory");

  // --- rho-sweep ---
  auto* sweep = app.add_subcommand(
      "rho-sweep", "train SAM across a rho grid, pick by matched EER");
  std::string sweep_config;
  std::vector<double> sweep_rhos = {0.05, 0.01, 0.005, 0.001};
  sweep->add_option("--config", sweep_config, "experiment config file")
      ->required();
  sweep->add_option("--rhos", sweep_rhos, "rho grid");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    const sb::ExperimentConfig cfg = sb::load_config(gen_config);
    sb::ensure_dir(gen_out);
    sb::write_generated_dataset(sb::generate_train(cfg.task),
                                gen_out + "/train.csv");
    sb::write_generated_dataset(sb::generate_matched_eval(cfg.task),
                                gen_out + "/matched.csv");
    for (const sb::ShiftSpec& s : cfg.shifts) {
      const sb::GeneratedDataset gd = sb::generate_shifted_test(cfg.task, s);
      sb::write_generated_dataset(gd,
                                  gen_out + "/" + gd.provenance.name + ".csv");
    }
    std::cout << "wrote datasets to " << gen_out << "\n";
    return 0;
  }

  if (train->parsed()) {
    const sb::ExperimentConfig cfg = sb::load_config(train_config);
    const std::vector<std::uint64_t>& seeds =
        train_seeds.empty() ? cfg.seeds : train_seeds;
    for (std::uint64_t seed : seeds) {
      const sb::RunResult r = sb::cmd_train(cfg, seed);
      std::cout << r.run_id << ": matched EER " << fmt(r.eer.at("matched"))
                << ", matched sharpness " << fmt(r.sharpness.at("matched"))
                << "\n";
    }
    return 0;
  }

  if (evaluate->parsed()) {
    const auto eers = sb::cmd_evaluate(eval_checkpoint, eval_data);
    for (const auto& [path, eer] : eers) {
      std::cout << path << ": EER " << fmt(eer) << " (" << fmt(eer * 100.0)
                << "%)\n";
    }
    return 0;
  }

  if (sharp->parsed()) {
    const sb::MlpModel model = sb::load_checkpoint(sharp_checkpoint);
    const sb::Dataset ds = sb::read_dataset_csv(sharp_data);
    const sb::SharpnessReport report = sb::dataset_sharpness(
        model, ds, sharp_cfg, sharp_checkpoint, sharp_data);
    std::cout << "m-sharpness over " << report.per_batch.size()
              << " batches: mean " << fmt(report.mean) << ", std "
              << fmt(report.stddev) << "\n";
    if (!sharp_json.empty()) sb::write_sharpness_json(report, sharp_json);
    if (!sharp_csv.empty()) sb::write_sharpness_csv(report, sharp_csv);
    return 0;
  }

  if (land->parsed()) {
    const sb::MlpModel model = sb::load_checkpoint(land_checkpoint);
    const sb::Dataset ds = sb::read_dataset_csv(land_data);
    const sb::DirectionPair dirs = sb::sample_directions(
        model, land_seed, sb::direction_norm_from_string(land_norm));
    const sb::LandscapeGrid grid = sb::evaluate_grid(
        model, ds, dirs, land_half_range, land_resolution, {}, land_data);
    std::cout << "grid " << land_resolution << "x" << land_resolution
              << ": origin loss " << fmt(grid.origin_loss) << ", spread "
              << fmt(sb::grid_spread(grid)) << ", overflow "
              << grid.overflow_count << "\n";
    if (!land_csv.empty()) sb::write_landscape_csv(grid, land_csv);
    if (!land_json.empty()) sb::write_landscape_json(grid, land_json);
    return 0;
  }

  if (bench->parsed()) {
    const sb::ExperimentConfig cfg = sb::load_config(bench_config);
    const sb::ResultsTable table = sb::cmd_benchmark(cfg);
    for (const auto& [system, sets] : table.eer_cells) {
      for (const auto& [set, cell] : sets) {
        std::cout << system << " @ " << set << ": EER " << fmt(cell.mean)
                  << " +- " << fmt(cell.stddev)
                  << (cell.winner ? "  *" : "") << "\n";
      }
    }
    std::cout << "results in " << cfg.output_dir << "\n";
    return 0;
  }

  if (corr->parsed()) {
    const sb::CorrelateOutput out = sb::cmd_correlate(corr_results, corr_out);
    for (const auto& [set, rep] : out.per_set) {
      std::cout << set << ": PCC " << fmt(rep.pcc) << " (p=" << fmt(rep.p_pcc)
                << "), SRCC " << fmt(rep.srcc) << " (p=" << fmt(rep.p_srcc)
                << "), KTAU " << fmt(rep.ktau) << " (p=" << fmt(rep.p_ktau)
                << ")\n";
    }
    return 0;
  }

  if (sweep->parsed()) {
    const sb::ExperimentConfig cfg = sb::load_config(sweep_config);
    const sb::RhoSweepResult res = sb::cmd_rho_sweep(cfg, sweep_rhos);
    for (const auto& e : res.entries) {
      std::cout << "rho " << e.rho << ": mean matched EER "
                << fmt(e.mean_matched_eer) << "\n";
    }
    std::cout << "chosen rho: " << res.chosen_rho << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sb::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
