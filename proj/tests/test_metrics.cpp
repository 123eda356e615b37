#include <algorithm>
#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpbench/correlation.hpp"
#include "sharpbench/eer.hpp"
#include "sharpbench/rng.hpp"
#include "sharpbench/stats.hpp"

using namespace sharpbench;

TEST_CASE("eer fixtures") {
  SUBCASE("perfect separation") {
    EerResult r = compute_eer({{0.9, 0.8}, {0.1, 0.2}});
    CHECK(r.eer == 0.0);
  }
  SUBCASE("fully inverted scores") {
    EerResult r = compute_eer({{0.1, 0.2}, {0.9, 0.8}});
    CHECK(r.eer == 1.0);
  }
  SUBCASE("interleaved scores cross at 0.5") {
    EerResult r = compute_eer({{0.8, 0.4}, {0.6, 0.2}});
    CHECK(r.eer == 0.5);
  }
  SUBCASE("all-equal scores give chance performance") {
    EerResult r = compute_eer({{1.0, 1.0, 1.0}, {1.0, 1.0}});
    CHECK(r.eer == 0.5);
  }
  SUBCASE("empty class rejected") {
    CHECK_THROWS_AS(compute_eer({{}, {0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(compute_eer({{0.1}, {}}), std::invalid_argument);
  }
}

TEST_CASE("eer equals the brute-force sweep on random score sets") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    ScoreSet s;
    const std::size_t nb = 1 + rng.below(200);
    const std::size_t ns = 1 + rng.below(200);
    const double sep = rng.uniform(-1.0, 2.0);
    for (std::size_t i = 0; i < nb; ++i) s.bona.push_back(rng.normal() + sep);
    for (std::size_t i = 0; i < ns; ++i) s.spoof.push_back(rng.normal());
    if (trial % 3 == 0) {
      // Quantize to force ties across and within classes.
      for (double& v : s.bona) v = std::round(v * 4.0) / 4.0;
      for (double& v : s.spoof) v = std::round(v * 4.0) / 4.0;
    }
    EerResult fast = compute_eer(s);
    EerResult brute = oracle::brute_force_eer(s);
    CAPTURE(trial);
    CHECK(fast.eer == brute.eer);
    CHECK(fast.threshold == brute.threshold);
    CHECK(fast.eer >= 0.0);
    CHECK(fast.eer <= 1.0);
  }
}

TEST_CASE("eer is invariant under strictly increasing transforms") {
  Rng rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet s;
    for (int i = 0; i < 40; ++i) s.bona.push_back(rng.normal() + 0.5);
    for (int i = 0; i < 30; ++i) s.spoof.push_back(rng.normal());
    const double base = compute_eer(s).eer;

    ScoreSet warped;
    auto warp = [](double v) { return std::exp(0.7 * v) + 3.0; };
    for (double v : s.bona) warped.bona.push_back(warp(v));
    for (double v : s.spoof) warped.spoof.push_back(warp(v));
    CHECK(compute_eer(warped).eer == base);
  }
}

TEST_CASE("eer is symmetric under class swap with negated scores") {
  Rng rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet s;
    for (int i = 0; i < 25; ++i) s.bona.push_back(rng.normal() + 0.3);
    for (int i = 0; i < 35; ++i) s.spoof.push_back(rng.normal());
    ScoreSet swapped;
    for (double v : s.spoof) swapped.bona.push_back(-v);
    for (double v : s.bona) swapped.spoof.push_back(-v);
    CHECK(compute_eer(swapped).eer ==
          doctest::Approx(compute_eer(s).eer).epsilon(1e-12));
  }
}

TEST_CASE("student-t and normal tail probabilities") {
  // Frozen from an independent high-precision evaluation.
  CHECK(std::fabs(student_t_sf(2.5003, 3) - 0.043841726938913896) <= 1e-13);
  CHECK(std::fabs(student_t_sf(1.0, 5) - 0.18160873382456127) <= 1e-13);
  CHECK(std::fabs(student_t_sf(3.2, 18) - 0.002481244998003627) <= 1e-13);
  CHECK(std::fabs(student_t_sf(0.5, 2) - 0.33333333333333337) <= 1e-13);
  CHECK(std::fabs(normal_sf(1.96) - 0.024997895148220435) <= 1e-15);
  CHECK(student_t_two_sided_p(0.0, 7) == doctest::Approx(1.0));
}

TEST_CASE("pearson fixtures") {
  SUBCASE("exact linearity") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    CorrelationResult r = pearson(x, y);
    CHECK(r.coefficient == 1.0);
    CHECK(r.p_value <= 1e-12);
  }
  SUBCASE("negated input") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {-1, -2, -3, -4, -5};
    CHECK(pearson(x, y).coefficient == -1.0);
  }
  SUBCASE("frozen five-point value") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {2, 1, 4, 3, 6};
    CorrelationResult r = pearson(x, y);
    CHECK(std::fabs(r.coefficient - 0.8219949365267865) <= 1e-12);
    CHECK(std::fabs(r.p_value - 0.08770664700806553) <= 1e-12);
  }
  SUBCASE("zero variance rejected") {
    std::vector<double> x = {1, 1, 1, 1};
    std::vector<double> y = {1, 2, 3, 4};
    CHECK_THROWS_WITH_AS(pearson(x, y), doctest::Contains("zero variance"),
                         std::domain_error);
  }
  SUBCASE("needs three points") {
    std::vector<double> x = {1, 2};
    CHECK_THROWS_AS(pearson(x, x), std::invalid_argument);
  }
}

TEST_CASE("spearman fixtures") {
  SUBCASE("monotone transform has rank correlation 1") {
    std::vector<double> x = {0.3, 1.5, 2.0, 7.7, 9.1};
    std::vector<double> y;
    for (double v : x) y.push_back(std::exp(v));
    CHECK(spearman(x, y).coefficient == 1.0);
    std::reverse(y.begin(), y.end());
    CHECK(spearman(x, y).coefficient == -1.0);
  }
  SUBCASE("frozen four-point value") {
    std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y = {1, 3, 2, 4};
    CorrelationResult r = spearman(x, y);
    CHECK(std::fabs(r.coefficient - 0.8) <= 1e-15);
    CHECK(std::fabs(r.p_value - 0.2) <= 1e-12);
  }
  SUBCASE("fractional ranks average over ties") {
    std::vector<double> x = {3.0, 1.0, 3.0, 2.0};
    std::vector<double> r = fractional_ranks(x);
    CHECK(r == std::vector<double>{3.5, 1.0, 3.5, 2.0});
  }
  SUBCASE("permutation p-value on a tiny input") {
    std::vector<double> x = {1, 2, 3};
    std::vector<double> y = {1, 3, 2};
    CorrelationResult r = spearman(x, y, SpearmanPValue::kPermutation);
    CHECK(std::fabs(r.coefficient - 0.5) <= 1e-15);
    CHECK(r.p_value == 1.0);  // all 6 pairings reach |rho| >= 0.5
    std::vector<double> big(11);
    for (std::size_t i = 0; i < big.size(); ++i) {
      big[i] = static_cast<double>(i);
    }
    CHECK_THROWS_AS(spearman(big, big, SpearmanPValue::kPermutation),
                    std::invalid_argument);
  }
}

TEST_CASE("kendall fixtures") {
  SUBCASE("identical orderings") {
    std::vector<double> x = {1, 5, 9};
    CHECK(kendall_tau(x, x).coefficient == 1.0);
  }
  SUBCASE("frozen three-point value, normal-approximation p") {
    std::vector<double> x = {1, 2, 3};
    std::vector<double> y = {1, 3, 2};
    CorrelationResult r = kendall_tau(x, y);
    CHECK(std::fabs(r.coefficient - 1.0 / 3.0) <= 1e-15);
    CHECK(std::fabs(r.p_value - 0.6015081344405899) <= 1e-12);
  }
  SUBCASE("frozen tie-corrected value") {
    std::vector<double> x = {1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 5.0};
    std::vector<double> y = {2.0, 2.0, 3.0, 3.0, 5.0, 4.0, 6.0};
    CorrelationResult r = kendall_tau(x, y);
    CHECK(std::fabs(r.coefficient - 0.8947368421052629) <= 1e-12);
    CHECK(std::fabs(r.p_value - 0.007573669804117922) <= 1e-12);
  }
  SUBCASE("all-tied input rejected") {
    std::vector<double> x = {2, 2, 2};
    std::vector<double> y = {1, 2, 3};
    CHECK_THROWS_WITH_AS(kendall_tau(x, y), doctest::Contains("zero variance"),
                         std::domain_error);
  }
}

TEST_CASE("frozen ten-point fixture for all three tests") {
  const std::vector<double> x = {
      0.30471707975443135, -1.0399841062404955, 0.7504511958064572,
      0.9405647163912139,  -1.9510351886538364, -1.302179506862318,
      0.12784040316728537, -0.3162425923435822, -0.016801157504288795,
      -0.85304392757358};
  const std::vector<double> y = {
      0.8558769197674786,  0.10224149522291093, 0.42805015595220147,
      1.3720753237700332,  -0.6015101205252817, -1.3385237237377496,
      0.35892082884964177, -0.9252273768349903, 0.6943596622936736,
      -0.4664626925757923};
  CorrelationResult pc = pearson(x, y);
  CHECK(std::fabs(pc.coefficient - 0.7725968149224831) <= 1e-12);
  CHECK(std::fabs(pc.p_value - 0.008799509804501579) <= 1e-12);
  CorrelationResult sp = spearman(x, y);
  CHECK(std::fabs(sp.coefficient - 0.8303030303030302) <= 1e-12);
  CHECK(std::fabs(sp.p_value - 0.0029402270232795065) <= 1e-12);
  CorrelationResult kt = kendall_tau(x, y);
  CHECK(std::fabs(kt.coefficient - 0.6444444444444444) <= 1e-12);
  CHECK(std::fabs(kt.p_value - 0.009491096053440909) <= 1e-12);
}

TEST_CASE("coefficients match brute-force implementations") {
  Rng rng(404);
  int tied_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng.below(13);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    if (trial % 2 == 0) {
      // Quantize to create ties (including tau-b's tie corrections).
      for (double& v : x) v = std::round(v * 2.0) / 2.0;
      for (double& v : y) v = std::round(v * 2.0) / 2.0;
    }
    // Skip degenerate all-tied draws.
    const bool x_const = std::all_of(x.begin(), x.end(),
                                     [&](double v) { return v == x[0]; });
    const bool y_const = std::all_of(y.begin(), y.end(),
                                     [&](double v) { return v == y[0]; });
    if (x_const || y_const) continue;
    if (std::adjacent_find(x.begin(), x.end()) != x.end()) ++tied_cases;

    CAPTURE(trial);
    CHECK(std::fabs(pearson(x, y).coefficient -
                    oracle::brute_force_pearson(x, y)) <= 1e-12);
    CHECK(std::fabs(spearman(x, y).coefficient -
                    oracle::brute_force_spearman(x, y)) <= 1e-12);
    CHECK(std::fabs(kendall_tau(x, y).coefficient -
                    oracle::brute_force_kendall(x, y)) <= 1e-12);
  }
  CHECK(tied_cases > 50);
}

TEST_CASE("coefficient invariances") {
  Rng rng(505);
  std::vector<double> x(12), y(12);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    y[i] = 0.6 * x[i] + rng.normal();
  }

  SUBCASE("pearson under separate positive affine maps") {
    std::vector<double> xs, ys;
    for (double v : x) xs.push_back(3.5 * v + 2.0);
    for (double v : y) ys.push_back(0.25 * v - 7.0);
    CHECK(std::fabs(pearson(xs, ys).coefficient - pearson(x, y).coefficient) <=
          1e-12);
    // Power-of-two scaling is exact.
    std::vector<double> x2, y2;
    for (double v : x) x2.push_back(2.0 * v);
    for (double v : y) y2.push_back(0.5 * v);
    CHECK(pearson(x2, y2).coefficient == pearson(x, y).coefficient);
  }

  SUBCASE("rank statistics under strictly monotone transforms") {
    std::vector<double> xs, ys;
    for (double v : x) xs.push_back(std::exp(v));
    for (double v : y) ys.push_back(std::atan(v) * 5.0 + 1.0);
    CHECK(spearman(xs, ys).coefficient == spearman(x, y).coefficient);
    CHECK(kendall_tau(xs, ys).coefficient == kendall_tau(x, y).coefficient);
  }
}

TEST_CASE("correlate_systems runs the full battery") {
  std::vector<SystemPoint> points;
  for (int i = 0; i < 24; ++i) {
    const double s = 0.01 * (i + 1);
    points.push_back(SystemPoint{s, s * s * 100.0, "sys" + std::to_string(i),
                                 i % 2 == 0 ? "adam" : "sam"});
  }
  CorrelationReport rep = correlate_systems(points);
  CHECK(rep.n == 24);
  CHECK(rep.srcc == 1.0);  // strictly monotone
  CHECK(rep.pcc > 0.9);
  CHECK(rep.ktau == 1.0);
  CHECK(rep.pcc_sig01);
  CHECK(rep.srcc_sig01);
  CHECK(rep.ktau_sig01);
  CHECK(rep.pcc_sig05);
  CHECK(rep.scatter.size() == 24);

  const std::string json = correlation_report_json(rep);
  CHECK(json.find("\"srcc\"") != std::string::npos);
  CHECK(json.find("\"optimizer\": \"sam\"") != std::string::npos);

  CHECK_THROWS_AS(correlate_systems({points[0], points[1]}),
                  std::invalid_argument);
}
