#pragma once

#include <span>
#include <string>
#include <vector>

namespace sharpbench {

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
};

// Pearson linear correlation; two-sided p-value via the t-transform
// t = r * sqrt((n-2)/(1-r^2)) against Student-t with n-2 dof.
// Requires n >= 3; throws "zero variance" on constant input.
CorrelationResult pearson(std::span<const double> x,
                          std::span<const double> y);

// Average (fractional) ranks; ties share the mean of their rank range.
std::vector<double> fractional_ranks(std::span<const double> x);

enum class SpearmanPValue {
  kTApprox,      // t-approximation on the rank correlation (default)
  kPermutation,  // exact two-sided permutation test, n <= 10 only
};

// Pearson correlation of fractional ranks.
CorrelationResult spearman(std::span<const double> x,
                           std::span<const double> y,
                           SpearmanPValue method = SpearmanPValue::kTApprox);

// Kendall tau-b (tie-corrected); p-value from the normal approximation on
// the concordant-minus-discordant count with tie-adjusted variance.
CorrelationResult kendall_tau(std::span<const double> x,
                              std::span<const double> y);

// One (sharpness, EER) point per trained system.
struct SystemPoint {
  double sharpness = 0.0;
  double eer = 0.0;
  std::string system;
  std::string optimizer;  // "adam" or "sam"
};

struct CorrelationReport {
  std::size_t n = 0;
  double pcc = 0.0, srcc = 0.0, ktau = 0.0;
  double p_pcc = 1.0, p_srcc = 1.0, p_ktau = 1.0;
  bool pcc_sig05 = false, pcc_sig01 = false;
  bool srcc_sig05 = false, srcc_sig01 = false;
  bool ktau_sig05 = false, ktau_sig01 = false;
  std::vector<SystemPoint> scatter;  // echo of the input, for Fig-3 plots
};

// Runs all three tests on the (sharpness, eer) pairs and flags
// significance at p <= 0.05 and p <= 0.01.
CorrelationReport correlate_systems(const std::vector<SystemPoint>& points);

std::string correlation_report_json(const CorrelationReport& report);

}  // namespace sharpbench
