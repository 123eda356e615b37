#include <cmath>
#include <functional>

#include <stdexcept>

#include "doctest.h"
#include "sharpbench/rng.hpp"
#include "sharpbench/sharpness.hpp"

using namespace sharpbench;

namespace {

ParamVector flat(std::vector<double> values) {
  std::vector<LayoutEntry> layout = {{"w", {values.size()}, 0, values.size()}};
  return ParamVector(std::move(layout), std::move(values));
}

Batch random_batch(std::size_t m, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Tensor f = Tensor::zeros({m, d});
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) f.at(i, j) = rng.normal();
    labels[i] = static_cast<int>(rng.below(2));
  }
  return Batch(std::move(f), std::move(labels));
}

// Two-stage dense grid search over the rho ball: coarse pass over the full
// cube, then a refined pass around the best coarse point. Pure brute force,
// nothing shared with the estimator.
double grid_search_max_gain(
    const std::function<double(const std::vector<double>&)>& loss,
    const std::vector<double>& w, double rho, int n_per_dim,
    std::size_t* points_in_ball = nullptr) {
  const std::size_t k = w.size();
  const double base = loss(w);
  std::vector<double> best_eps(k, 0.0);
  double best = 0.0;

  auto sweep = [&](const std::vector<double>& center, double half) {
    std::vector<int> idx(k, 0);
    std::vector<double> eps(k);
    while (true) {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        eps[i] = center[i] +
                 (2.0 * idx[i] / (n_per_dim - 1.0) - 1.0) * half;
        norm2 += eps[i] * eps[i];
      }
      if (norm2 <= rho * rho) {
        if (points_in_ball) ++*points_in_ball;
        std::vector<double> p(k);
        for (std::size_t i = 0; i < k; ++i) p[i] = w[i] + eps[i];
        const double gain = loss(p) - base;
        if (gain > best) {
          best = gain;
          best_eps = eps;
        }
      }
      std::size_t carry = 0;
      while (carry < k && ++idx[carry] == n_per_dim) {
        idx[carry] = 0;
        ++carry;
      }
      if (carry == k) break;
    }
  };

  sweep(std::vector<double>(k, 0.0), rho);
  // Refine around the coarse maximizer.
  const double cell = 2.0 * rho / (n_per_dim - 1.0);
  sweep(best_eps, 2.0 * cell);
  return best;
}

}  // namespace

TEST_CASE("quadratic toy loss at the minimum: sharpness = rho^2/2") {
  LossGradFn f = [](const ParamVector& p) {
    const double v = p.values()[0];
    ParamVector g = p;
    return LossGrad{0.5 * v * v, std::move(g)};
  };
  SharpnessConfig cfg;
  cfg.rho = 0.05;
  cfg.seed = 11;
  const double expected = 0.5 * cfg.rho * cfg.rho;  // 0.00125
  const double got = max_loss_increase(f, flat({0.0}), cfg);
  CHECK(std::fabs(got - expected) <= 0.05 * expected);
}

TEST_CASE("linear toy loss: sharpness = rho * ||a|| via the analytic point") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(4), w(4);
    for (std::size_t i = 0; i < 4; ++i) {
      a[i] = rng.normal();
      w[i] = rng.normal();
    }
    LossGradFn f = [&](const ParamVector& p) {
      double loss = 0.0;
      ParamVector g = ParamVector::zeros_like(p);
      for (std::size_t i = 0; i < 4; ++i) {
        loss += a[i] * p.values()[i];
        g.values()[i] = a[i];
      }
      return LossGrad{loss, std::move(g)};
    };
    SharpnessConfig cfg;
    cfg.rho = 0.05;
    cfg.seed = 1000 + trial;
    double norm_a = 0.0;
    for (double v : a) norm_a += v * v;
    norm_a = std::sqrt(norm_a);
    const double got = max_loss_increase(f, flat(w), cfg);
    CHECK(std::fabs(got - cfg.rho * norm_a) <= 1e-9);
  }
}

TEST_CASE("estimator matches a dense grid oracle on tiny problems") {
  Rng rng(29);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t k = trial % 2 == 0 ? 2 : 3;
    std::vector<double> curv(k), lin(k), w(k);
    for (std::size_t i = 0; i < k; ++i) {
      curv[i] = rng.uniform(-1.0, 1.5);  // indefinite quadratics allowed
      lin[i] = rng.normal();
      w[i] = 0.3 * rng.normal();
    }
    auto scalar_loss = [&](const std::vector<double>& p) {
      double loss = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        loss += 0.5 * curv[i] * p[i] * p[i] + lin[i] * p[i] +
                0.1 * std::sin(3.0 * p[i]);
      }
      return loss;
    };
    LossGradFn f = [&](const ParamVector& p) {
      ParamVector g = ParamVector::zeros_like(p);
      for (std::size_t i = 0; i < k; ++i) {
        const double v = p.values()[i];
        g.values()[i] = curv[i] * v + lin[i] + 0.3 * std::cos(3.0 * v);
      }
      return LossGrad{scalar_loss(p.values()), std::move(g)};
    };

    SharpnessConfig cfg;
    cfg.rho = 0.05;
    cfg.restarts = 6;
    cfg.ascent_steps = 60;
    cfg.seed = 500 + trial;
    const double est = max_loss_increase(f, flat(w), cfg);

    std::size_t points = 0;
    const double grid = grid_search_max_gain(scalar_loss, w, cfg.rho,
                                             k == 2 ? 115 : 27, &points);
    REQUIRE(points >= 10000);
    CAPTURE(trial);
    CHECK(std::fabs(est - grid) <= 0.02 * std::max(grid, 1e-9));
  }
}

TEST_CASE("constant loss surface has sharpness exactly 0") {
  LossGradFn constant = [](const ParamVector& p) {
    return LossGrad{1.25, ParamVector::zeros_like(p)};
  };
  SharpnessConfig cfg;
  cfg.seed = 3;
  CHECK(max_loss_increase(constant, flat({0.2, -0.4}), cfg) == 0.0);
}

TEST_CASE("all-zero model keeps sharpness non-negative") {
  MlpModel model{{3, 4, 2}, Activation::kRelu, MlpModel::make_layout({3, 4, 2})};
  Batch batch = random_batch(8, 3, 123);
  SharpnessConfig cfg;
  cfg.seed = 9;
  CHECK(batch_sharpness(model, batch, cfg) >= 0.0);
}

TEST_CASE("sharpness is non-negative on random models and batches") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MlpModel model = MlpModel::init({4, 6, 2}, Activation::kRelu, seed);
    Batch batch = random_batch(16, 4, seed + 50);
    SharpnessConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 2;
    cfg.ascent_steps = 10;
    CHECK(batch_sharpness(model, batch, cfg) >= 0.0);
  }
}

TEST_CASE("more ascent steps never lower the estimate") {
  MlpModel model = MlpModel::init({4, 6, 2}, Activation::kTanh, 7);
  Batch batch = random_batch(16, 4, 57);
  SharpnessConfig short_cfg;
  short_cfg.seed = 21;
  short_cfg.ascent_steps = 5;
  SharpnessConfig long_cfg = short_cfg;
  long_cfg.ascent_steps = 20;
  const double s_short = batch_sharpness(model, batch, short_cfg);
  const double s_long = batch_sharpness(model, batch, long_cfg);
  CHECK(s_long >= s_short);
}

TEST_CASE("sharpness grows with rho (statistically over seeds)") {
  double sum_small = 0.0, sum_large = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MlpModel model = MlpModel::init({4, 6, 2}, Activation::kTanh, seed);
    Batch batch = random_batch(16, 4, seed + 90);
    SharpnessConfig small_cfg;
    small_cfg.rho = 0.01;
    small_cfg.seed = seed;
    SharpnessConfig large_cfg = small_cfg;
    large_cfg.rho = 0.05;
    sum_small += batch_sharpness(model, batch, small_cfg);
    sum_large += batch_sharpness(model, batch, large_cfg);
  }
  CHECK(sum_large >= sum_small);
}

TEST_CASE("dataset sharpness aggregation") {
  MlpModel model = MlpModel::init({4, 6, 2}, Activation::kRelu, 31);
  Batch big = random_batch(64, 4, 77);
  Dataset ds(big.features, big.labels);

  SharpnessConfig cfg;
  cfg.batch_size = 32;
  cfg.seed = 5;
  cfg.restarts = 2;
  cfg.ascent_steps = 8;

  SharpnessReport report = dataset_sharpness(model, ds, cfg, "m", "d");
  REQUIRE(report.per_batch.size() == 2);
  CHECK(!report.has_partial_batch);
  CHECK(report.mean ==
        (report.per_batch[0] + report.per_batch[1]) / 2.0);
  for (double v : report.per_batch) CHECK(v >= 0.0);

  SUBCASE("single-batch dataset equals batch_sharpness") {
    Dataset one(Tensor({32, 4}, std::vector<double>(
                                    big.features.data.begin(),
                                    big.features.data.begin() + 32 * 4)),
                std::vector<int>(big.labels.begin(), big.labels.begin() + 32));
    SharpnessReport r1 = dataset_sharpness(model, one, cfg);
    Batch b0(one.features(), one.labels());
    CHECK(r1.mean == batch_sharpness(model, b0, cfg));
  }

  SUBCASE("duplicating the dataset keeps the mean, doubles per_batch") {
    Tensor f2 = Tensor::zeros({128, 4});
    std::vector<int> l2(128);
    for (std::size_t i = 0; i < 128; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        f2.at(i, j) = big.features.at(i % 64, j);
      }
      l2[i] = big.labels[i % 64];
    }
    SharpnessReport doubled = dataset_sharpness(model, Dataset(f2, l2), cfg);
    REQUIRE(doubled.per_batch.size() == 4);
    // Identical batches get identical per-batch values (content-keyed
    // estimator seeds), so the mean is unchanged up to summation rounding.
    CHECK(doubled.per_batch[2] == report.per_batch[0]);
    CHECK(doubled.per_batch[3] == report.per_batch[1]);
    CHECK(doubled.mean == doctest::Approx(report.mean).epsilon(1e-14));
  }

  SUBCASE("partial batches are flagged") {
    Dataset partial(Tensor({48, 4}, std::vector<double>(
                                        big.features.data.begin(),
                                        big.features.data.begin() + 48 * 4)),
                    std::vector<int>(big.labels.begin(),
                                     big.labels.begin() + 48));
    SharpnessReport r = dataset_sharpness(model, partial, cfg);
    CHECK(r.has_partial_batch);
    CHECK(r.per_batch.size() == 2);
  }

  SUBCASE("empty dataset rejected") {
    Dataset empty(Tensor({0, 4}, {}), {});
    CHECK_THROWS_AS(dataset_sharpness(model, empty, cfg),
                    std::invalid_argument);
  }
}

TEST_CASE("scaling the output layer raises dataset sharpness") {
  MlpModel a = MlpModel::init({4, 6, 2}, Activation::kTanh, 41);
  Batch big = random_batch(64, 4, 99);
  Dataset ds(big.features, big.labels);

  MlpModel b = a;
  // Scale the final affine layer (weights and bias) by 10.
  const std::size_t last = a.num_affine_layers() - 1;
  for (double& v : b.params.block(2 * last)) v *= 10.0;
  for (double& v : b.params.block(2 * last + 1)) v *= 10.0;

  SharpnessConfig cfg;
  cfg.batch_size = 32;
  cfg.seed = 8;
  CHECK(dataset_sharpness(b, ds, cfg).mean >=
        dataset_sharpness(a, ds, cfg).mean);
}

TEST_CASE("sharpness report serialization") {
  MlpModel model = MlpModel::init({4, 6, 2}, Activation::kRelu, 3);
  Batch big = random_batch(64, 4, 4);
  Dataset ds(big.features, big.labels);
  SharpnessConfig cfg;
  cfg.batch_size = 32;
  cfg.restarts = 1;
  cfg.ascent_steps = 4;
  SharpnessReport report = dataset_sharpness(model, ds, cfg, "model", "set");
  const std::string json = sharpness_report_json(report);
  CHECK(json.find("\"per_batch\"") != std::string::npos);
  CHECK(json.find("\"model_id\": \"model\"") != std::string::npos);

  write_sharpness_csv(report, "test_sharpness.csv");
  std::remove("test_sharpness.csv");
}
