#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sharpbench/config.hpp"
#include "sharpbench/correlation.hpp"
#include "sharpbench/eer.hpp"
#include "sharpbench/landscape.hpp"

namespace sharpbench {

// Raised when training or evaluation hits non-finite numbers; the CLI maps
// it to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepLogRow {
  std::size_t step = 0;
  double lr = 0.0;
  double loss_w = 0.0;
  double loss_w_plus_eps = 0.0;
  double eps_norm = 0.0;
  bool degenerate = false;
};

// One trained system: everything Table-1/Table-2 style analyses need.
// wall_seconds is volatile metadata and lives outside the payload in the
// serialized form, so payloads are byte-identical across reruns.
struct RunResult {
  std::string run_id;
  std::string system;     // optimizer plus rho tag, e.g. "sam-rho0.05"
  std::string optimizer;  // "adam" | "sam"
  double rho = 0.0;       // 0 for adam
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, double> eer;        // test set name -> EER
  std::map<std::string, double> sharpness;  // test set name -> mean sharpness
  double final_train_loss = 0.0;
  std::string checkpoint_path;
  std::string train_log_path;
  double wall_seconds = 0.0;
};

std::string run_result_payload_json(const RunResult& r);
std::string run_result_json(const RunResult& r);
RunResult run_result_from_json(const std::string& text);

// Deterministic training of one model per (config, seed). The step log is
// appended per optimizer step; aborts with NumericalError (naming step, lr
// and batch) if the loss turns non-finite.
MlpModel train_model(const ExperimentConfig& cfg, std::uint64_t seed,
                     const Dataset& train, std::vector<StepLogRow>* log);

ScoreSet score_dataset(const MlpModel& model, const Dataset& ds);
EerResult evaluate_eer(const MlpModel& model, const Dataset& ds);

// Evaluation suite of a config: "matched" plus one entry per shift.
std::vector<std::pair<std::string, GeneratedDataset>> build_eval_suite(
    const ExperimentConfig& cfg);

// train + evaluate + persist artifacts under cfg.output_dir/runs/<run_id>/.
RunResult cmd_train(const ExperimentConfig& cfg, std::uint64_t seed);

struct TableCell {
  double mean = 0.0;
  double stddev = 0.0;
  bool winner = false;  // lower mean EER between the optimizers
};

struct ResultsTable {
  std::vector<RunResult> runs;
  // (optimizer, test set) -> aggregated EER.
  std::map<std::string, std::map<std::string, TableCell>> eer_cells;
  std::map<std::string, std::map<std::string, TableCell>> sharpness_cells;
};

// Trains both optimizers across cfg.seeds, writes results.csv, the
// aggregated table JSON and per-optimizer mismatch-curve CSVs.
ResultsTable cmd_benchmark(const ExperimentConfig& cfg);

// EER per test set for an existing checkpoint.
std::map<std::string, double> cmd_evaluate(
    const std::string& checkpoint_path,
    const std::vector<std::string>& dataset_csvs);

struct CorrelateOutput {
  // test set name -> report over all systems in the results file.
  std::map<std::string, CorrelationReport> per_set;
};

// Reads a results.csv (as written by benchmark/train) and correlates
// sharpness against EER per test set; writes correlation_report JSONs,
// a Table-2 style grid CSV and the Fig-3 scatter CSV.
CorrelateOutput cmd_correlate(const std::string& results_csv,
                              const std::string& out_dir);

struct RhoSweepEntry {
  double rho = 0.0;
  double mean_matched_eer = 0.0;
  std::vector<RunResult> runs;
};

struct RhoSweepResult {
  std::vector<RhoSweepEntry> entries;
  double chosen_rho = 0.0;  // lowest mean matched EER
};

RhoSweepResult cmd_rho_sweep(const ExperimentConfig& cfg,
                             const std::vector<double>& rhos);

// results.csv helpers shared by benchmark and correlate.
void write_results_csv(const std::vector<RunResult>& runs,
                       const std::string& path);
std::vector<RunResult> read_results_csv(const std::string& path);

void ensure_dir(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace sharpbench
