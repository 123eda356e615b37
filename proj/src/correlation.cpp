#include "sharpbench/correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sharpbench/stats.hpp"

#include "nlohmann/json.hpp"

namespace sharpbench {

namespace {

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("correlation: length mismatch");
  }
  if (x.size() < 3) {
    throw std::invalid_argument("correlation: need at least 3 points");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("correlation: non-finite x");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("correlation: non-finite y");
  }
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::domain_error("correlation: zero variance");
  }
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double t_approx_p(double r, std::size_t n) {
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - r * r;
  if (denom <= 0.0) return 0.0;  // |r| = 1, t diverges
  const double t = r * std::sqrt(df / denom);
  return student_t_two_sided_p(t, df);
}

}  // namespace

CorrelationResult pearson(std::span<const double> x,
                          std::span<const double> y) {
  check_lengths(x, y);
  const double r = pearson_r(x, y);
  return {r, t_approx_p(r, x.size())};
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult spearman(std::span<const double> x,
                           std::span<const double> y, SpearmanPValue method) {
  check_lengths(x, y);
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  const double rho = pearson_r(rx, ry);

  if (method == SpearmanPValue::kTApprox) {
    return {rho, t_approx_p(rho, x.size())};
  }

  if (x.size() > 10) {
    throw std::invalid_argument(
        "spearman: permutation p-value limited to n <= 10");
  }
  // Exact two-sided permutation test: fraction of pairings whose |rho| is
  // at least the observed |rho| (small tolerance for float ties).
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> ry_perm(x.size());
  const double target = std::fabs(rho) - 1e-12;
  std::size_t hits = 0, total = 0;
  do {
    for (std::size_t i = 0; i < perm.size(); ++i) ry_perm[i] = ry[perm[i]];
    if (std::fabs(pearson_r(rx, ry_perm)) >= target) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {rho, static_cast<double>(hits) / static_cast<double>(total)};
}

CorrelationResult kendall_tau(std::span<const double> x,
                              std::span<const double> y) {
  check_lengths(x, y);
  const std::size_t n = x.size();

  double concordant = 0.0, discordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const double s = dx * dy;
      if (s > 0.0) concordant += 1.0;
      else if (s < 0.0) discordant += 1.0;
    }
  }

  // Tie bookkeeping for tau-b and the tie-adjusted variance.
  auto tie_sums = [](std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    double sum_t1 = 0.0;   // sum t*(t-1)/2
    double sum_v = 0.0;    // sum t*(t-1)*(2t+5)
    double sum_t2 = 0.0;   // sum t*(t-1)*(t-2)
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      sum_t1 += t * (t - 1.0) / 2.0;
      sum_v += t * (t - 1.0) * (2.0 * t + 5.0);
      sum_t2 += t * (t - 1.0) * (t - 2.0);
      i = j + 1;
    }
    return std::array<double, 3>{sum_t1, sum_v, sum_t2};
  };
  const auto [tx1, txv, tx2] = tie_sums(x);
  const auto [ty1, tyv, ty2] = tie_sums(y);

  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1.0) / 2.0;
  const double denom = std::sqrt((n0 - tx1) * (n0 - ty1));
  if (denom == 0.0) {
    throw std::domain_error("correlation: zero variance");
  }
  const double tau = std::clamp((concordant - discordant) / denom, -1.0, 1.0);

  // Normal approximation with tie-adjusted variance of C - D.
  const double v0 = nd * (nd - 1.0) * (2.0 * nd + 5.0);
  double var = (v0 - txv - tyv) / 18.0;
  var += (2.0 * tx1) * (2.0 * ty1) / (2.0 * nd * (nd - 1.0));
  var += tx2 * ty2 / (9.0 * nd * (nd - 1.0) * (nd - 2.0));
  double p = 1.0;
  if (var > 0.0) {
    const double z = (concordant - discordant) / std::sqrt(var);
    p = normal_two_sided_p(z);
  }
  return {tau, p};
}

CorrelationReport correlate_systems(const std::vector<SystemPoint>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("correlate_systems: need at least 3 systems");
  }
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    x.push_back(p.sharpness);
    y.push_back(p.eer);
  }

  CorrelationReport rep;
  rep.n = points.size();
  rep.scatter = points;

  const CorrelationResult pc = pearson(x, y);
  const CorrelationResult sp = spearman(x, y);
  const CorrelationResult kt = kendall_tau(x, y);
  rep.pcc = pc.coefficient;
  rep.p_pcc = pc.p_value;
  rep.srcc = sp.coefficient;
  rep.p_srcc = sp.p_value;
  rep.ktau = kt.coefficient;
  rep.p_ktau = kt.p_value;
  rep.pcc_sig05 = pc.p_value <= 0.05;
  rep.pcc_sig01 = pc.p_value <= 0.01;
  rep.srcc_sig05 = sp.p_value <= 0.05;
  rep.srcc_sig01 = sp.p_value <= 0.01;
  rep.ktau_sig05 = kt.p_value <= 0.05;
  rep.ktau_sig01 = kt.p_value <= 0.01;
  return rep;
}

std::string correlation_report_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["pcc"] = {{"coefficient", report.pcc},
              {"p_value", report.p_pcc},
              {"sig05", report.pcc_sig05},
              {"sig01", report.pcc_sig01}};
  j["srcc"] = {{"coefficient", report.srcc},
               {"p_value", report.p_srcc},
               {"sig05", report.srcc_sig05},
               {"sig01", report.srcc_sig01}};
  j["ktau"] = {{"coefficient", report.ktau},
               {"p_value", report.p_ktau},
               {"sig05", report.ktau_sig05},
               {"sig01", report.ktau_sig01}};
  nlohmann::ordered_json scatter = nlohmann::json::array();
  for (const auto& p : report.scatter) {
    scatter.push_back({{"sharpness", p.sharpness},
                       {"eer", p.eer},
                       {"optimizer", p.optimizer},
                       {"system", p.system}});
  }
  j["scatter"] = std::move(scatter);
  return j.dump(2);
}

}  // namespace sharpbench
