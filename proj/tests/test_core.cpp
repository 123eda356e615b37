#include <cmath>
#include <limits>

#include <stdexcept>

#include "doctest.h"
#include "sharpbench/checkpoint.hpp"
#include "sharpbench/dataset.hpp"
#include "sharpbench/param_vector.hpp"
#include "sharpbench/rng.hpp"
#include "sharpbench/tensor.hpp"

using namespace sharpbench;

TEST_CASE("tensor shape/data consistency") {
  CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5, 0.0)),
                  std::invalid_argument);
  Tensor t({2, 3}, std::vector<double>(6, 1.0));
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  t.at(1, 2) = 42.0;
  CHECK(t.data[5] == 42.0);
}

TEST_CASE("tensor finiteness checks") {
  Tensor t({1, 2}, {1.0, std::numeric_limits<double>::quiet_NaN()});
  CHECK(!t.all_finite());
  CHECK_THROWS_AS(t.require_finite("x"), std::invalid_argument);
}

TEST_CASE("param vector layout invariants") {
  std::vector<LayoutEntry> bad = {{"a", {2}, 0, 2}, {"b", {2}, 3, 2}};
  CHECK_THROWS_AS(ParamVector(bad, std::vector<double>(5, 0.0)),
                  std::invalid_argument);

  std::vector<LayoutEntry> good = {{"a", {2}, 0, 2}, {"b", {3}, 2, 3}};
  ParamVector p(good, {1, 2, 3, 4, 5});
  CHECK(p.size() == 5);
  CHECK(p.block(1)[0] == 3.0);
}

TEST_CASE("blas1 helpers") {
  std::vector<LayoutEntry> layout = {{"w", {3}, 0, 3}};
  ParamVector x(layout, {1, 2, 3});
  ParamVector y(layout, {4, 5, 6});

  SUBCASE("dot of (1,2,3).(4,5,6) is 32") { CHECK(param_dot(x, y) == 32.0); }

  SUBCASE("axpy with a=0 returns y") {
    ParamVector r = param_axpy(0.0, x, y);
    CHECK(r.values() == y.values());
  }

  SUBCASE("norm of unit basis vector is 1") {
    ParamVector e(layout, {0, 1, 0});
    CHECK(param_norm2(e) == 1.0);
  }

  SUBCASE("layout mismatch throws") {
    std::vector<LayoutEntry> other = {{"v", {3}, 0, 3}};
    ParamVector z(other, {1, 1, 1});
    CHECK_THROWS_AS(param_dot(x, z), std::invalid_argument);
  }

  SUBCASE("names first bad coordinate") {
    ParamVector z(layout, {1, std::numeric_limits<double>::infinity(), 3});
    CHECK(z.first_non_finite() == "w[1]");
  }
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform();
    CHECK(va == b.uniform());
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(a.normal() == b.normal());
  CHECK(Rng(mix_seed(1, 2)).uniform() != Rng(mix_seed(1, 3)).uniform());
  CHECK(c.below(10) < 10);
}

TEST_CASE("dataset batching determinism") {
  Tensor f = Tensor::zeros({10, 2});
  for (std::size_t i = 0; i < 10; ++i) f.at(i, 0) = static_cast<double>(i);
  Dataset ds(f, std::vector<int>(10, 0));

  const auto b1 = ds.shuffled_batches(3, 42);
  const auto b2 = ds.shuffled_batches(3, 42);
  REQUIRE(b1.size() == 4);  // 3+3+3+1, last partial
  CHECK(b1.back().size() == 1);
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i].features.data == b2[i].features.data);
  }

  // In-order batches preserve dataset order.
  const auto ordered = ds.batches(4);
  CHECK(ordered[0].features.at(0, 0) == 0.0);
  CHECK(ordered[1].features.at(0, 0) == 4.0);
}

TEST_CASE("dataset csv round trip") {
  Rng rng(3);
  Tensor f = Tensor::zeros({17, 4});
  std::vector<int> labels(17);
  for (std::size_t i = 0; i < 17; ++i) {
    for (std::size_t j = 0; j < 4; ++j) f.at(i, j) = rng.normal() * 1e-3;
    labels[i] = i % 2;
  }
  Dataset ds(f, labels);
  const std::string path = "test_dataset_roundtrip.csv";
  write_dataset_csv(ds, path);
  Dataset back = read_dataset_csv(path);
  CHECK(back.features().data == ds.features().data);
  CHECK(back.labels() == ds.labels());
  std::remove(path.c_str());
}

TEST_CASE("checkpoint round trips bit-exactly") {
  MlpModel model = MlpModel::init({5, 7, 2}, Activation::kTanh, 99);
  // Give the biases non-trivial values too.
  Rng rng(5);
  for (double& v : model.params.values()) v += 1e-3 * rng.normal();

  const std::string text = checkpoint_to_string(model);
  MlpModel back = checkpoint_from_string(text);
  CHECK(back.layer_dims == model.layer_dims);
  CHECK(back.activation == model.activation);
  CHECK(back.params.values() == model.params.values());

  SUBCASE("file round trip") {
    const std::string path = "test_checkpoint_roundtrip.txt";
    save_checkpoint(model, path);
    MlpModel loaded = load_checkpoint(path);
    CHECK(loaded.params.values() == model.params.values());
    std::remove(path.c_str());
  }

  SUBCASE("malformed inputs rejected") {
    CHECK_THROWS(checkpoint_from_string("not a checkpoint"));
    std::string truncated = text.substr(0, text.size() / 2);
    CHECK_THROWS(checkpoint_from_string(truncated));
  }
}
