// Copyright 2026 The ngcsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ngcsim/dataset.hpp"
#include "ngcsim/error.hpp"
#include "ngcsim/model.hpp"
#include "ngcsim/rng.hpp"

using namespace ngc;

namespace {

ModelSpec mlp(std::size_t in, std::size_t hidden, std::size_t classes,
              Activation act = Activation::tanh) {
  ModelSpec s;
  s.architecture = Architecture::mlp;
  s.input_dim = in;
  s.hidden_dim = hidden;
  s.num_classes = classes;
  s.activation = act;
  return s;
}

ModelSpec logistic(std::size_t in, std::size_t classes) {
  ModelSpec s;
  s.architecture = Architecture::logistic;
  s.input_dim = in;
  s.num_classes = classes;
  return s;
}

FlatParams random_params(const ModelSpec& s, Rng& rng, double scale = 0.5) {
  FlatParams p(s.param_count());
  for (double& v : p) v = scale * rng.normal();
  return p;
}

double max_rel_err(const FlatGradient& a, const FlatGradient& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double denom = std::max({std::abs(a[k]), std::abs(b[k]), 1e-6});
    worst = std::max(worst, std::abs(a[k] - b[k]) / denom);
  }
  return worst;
}

Batch all_rows(const Dataset& d) {
  Batch b(d.size());
  std::iota(b.begin(), b.end(), 0);
  return b;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(mlp(16, 32, 10).param_count() == 16 * 32 + 32 + 32 * 10 + 10);
  CHECK(mlp(2, 8, 3).param_count() == 51);
  CHECK(logistic(4, 3).param_count() == 15);
  ModelSpec bad = mlp(0, 3, 2);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = mlp(3, 3, 1);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("flatten and unflatten are inverse") {
  auto s = mlp(3, 4, 2);
  Rng rng(1);
  auto p = random_params(s, rng);
  auto layers = unflatten(s, p);
  CHECK(layers.w1.size() == 12);
  CHECK(layers.b1.size() == 4);
  CHECK(layers.w2.size() == 8);
  CHECK(layers.b2.size() == 2);
  CHECK(layers.w1[0] == p[0]);
  CHECK(layers.b1[0] == p[12]);
  CHECK(layers.w2[0] == p[16]);
  CHECK(layers.b2[1] == p[25]);
  CHECK(flatten(s, layers) == p);
  CHECK_THROWS_AS(unflatten(s, FlatParams(5)), ShapeError);
}

TEST_CASE("zero logistic model has loss log C and ties predict class 0") {
  auto s = logistic(3, 4);
  auto d = parse_csv("2,1,2,3\n3,0,0,1\n");
  FlatParams zero(s.param_count(), 0.0);
  auto lg = loss_and_gradient(s, zero, d, all_rows(d));
  CHECK(lg.loss == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  std::vector<double> x{1, 2, 3};
  CHECK(predict(s, zero, x) == 0);
}

TEST_CASE("hand-computed logistic gradient") {
  // One sample x = (1, 2), label 1, W = 0, b = 0, two classes:
  // softmax = (1/2, 1/2), dL/dz = (1/2, -1/2), dW = dz x^T.
  auto s = logistic(2, 2);
  auto d = parse_csv("1,1,2\n");
  FlatParams zero(s.param_count(), 0.0);
  auto lg = loss_and_gradient(s, zero, d, all_rows(d));
  CHECK(lg.grad == FlatGradient{0.5, 1.0, -0.5, -1.0, 0.5, -0.5});
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(2024);
  auto d = generate_synthetic(3, 2, 6, 0.7, 9);
  Batch batch{0, 3, 5, 7, 12, 17};
  for (auto act : {Activation::tanh, Activation::relu}) {
    auto s = mlp(2, 8, 3, act);
    for (int t = 0; t < 10; ++t) {
      auto p = random_params(s, rng);
      auto lg = loss_and_gradient(s, p, d, batch);
      auto fd = finite_difference_gradient(s, p, d, batch, 1e-6);
      CHECK(max_rel_err(lg.grad, fd) < 1e-5);
    }
  }
  auto lin = logistic(2, 3);
  for (int t = 0; t < 10; ++t) {
    auto p = random_params(lin, rng);
    auto lg = loss_and_gradient(lin, p, d, batch);
    CHECK(max_rel_err(lg.grad, finite_difference_gradient(lin, p, d, batch, 1e-6)) < 1e-5);
  }
  CHECK_THROWS_AS(finite_difference_gradient(lin, FlatParams(lin.param_count()), d, batch, 0.0),
                  ConfigError);
}

TEST_CASE("loss is stable for large logits") {
  auto s = logistic(1, 2);
  auto d = parse_csv("0,1\n");
  FlatParams p{1000.0, -1000.0, 0.0, 0.0};
  auto lg = loss_and_gradient(s, p, d, all_rows(d));
  CHECK(std::isfinite(lg.loss));
  CHECK(lg.loss < 1e-300);
  p = {-1000.0, 1000.0, 0.0, 0.0};
  CHECK(batch_loss(s, p, d, all_rows(d)) == doctest::Approx(2000.0));
}

TEST_CASE("cross_gradient is the gradient at the foreign parameters") {
  auto s = mlp(3, 5, 4);
  auto d = generate_synthetic(4, 3, 5, 0.4, 1);
  Rng rng(8);
  auto xj = random_params(s, rng);
  Batch b{1, 4, 9};
  CHECK(cross_gradient(s, xj, d, b) == loss_and_gradient(s, xj, d, b).grad);
}

TEST_CASE("batch validation") {
  auto s = logistic(2, 2);
  auto d = parse_csv("0,1,1\n1,2,2\n");
  FlatParams p(s.param_count(), 0.0);
  CHECK_THROWS_AS(loss_and_gradient(s, p, d, Batch{}), ShapeError);
  CHECK_THROWS_AS(loss_and_gradient(s, p, d, Batch{0, 2}), ShapeError);
  CHECK_THROWS_AS(loss_and_gradient(s, p, d, Batch{1, 1}), ShapeError);
  CHECK_THROWS_AS(loss_and_gradient(s, FlatParams(3), d, Batch{0}), ShapeError);
  auto wide = parse_csv("0,1,1,1\n");
  CHECK_THROWS_AS(loss_and_gradient(s, p, wide, Batch{0}), ShapeError);
}

TEST_CASE("evaluate reports accuracy as a fraction") {
  auto s = logistic(1, 2);
  auto d = parse_csv("0,1\n1,-1\n0,-2\n");
  // Logit z0 = x, z1 = -x: predicts class 0 for positive x.
  FlatParams p{1.0, -1.0, 0.0, 0.0};
  auto ev = evaluate(s, p, d);
  CHECK(ev.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(ev.loss > 0.0);
}

TEST_CASE("initialization") {
  Rng r1(3), r2(3);
  auto s = mlp(16, 32, 10);
  auto a = init_params(s, r1);
  auto b = init_params(s, r2);
  CHECK(a == b);
  auto layers = unflatten(s, a);
  const double limit1 = std::sqrt(6.0 / (16 + 32));
  for (double w : layers.w1) CHECK(std::abs(w) <= limit1);
  for (double v : layers.b1) CHECK(v == 0.0);
  for (double v : layers.b2) CHECK(v == 0.0);
  Rng r3(3);
  auto z = init_params(logistic(4, 3), r3);
  CHECK(std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; }));
}
