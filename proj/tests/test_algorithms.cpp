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
#include <set>

#include "ngcsim/algorithms.hpp"
#include "ngcsim/error.hpp"

using namespace ngc;

namespace {

FlatGradient random_vec(Rng& rng, std::size_t d) {
  FlatGradient v(d);
  for (double& x : v) x = rng.normal();
  return v;
}

// Agent 2 with neighbours 1 and 3 and uniform weights.
GradientBundle random_bundle(Rng& rng, std::size_t d) {
  GradientBundle b;
  b.self_id = 2;
  b.self_grad = random_vec(rng, d);
  for (std::size_t j : {1, 3}) {
    b.model_variant[j] = random_vec(rng, d);
    b.data_variant[j] = random_vec(rng, d);
  }
  for (std::size_t j : {1, 2, 3}) b.weights[j] = 1.0 / 3.0;
  return b;
}

}  // namespace

TEST_CASE("mixing equals the bias decomposition") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    auto b = random_bundle(rng, 11);
    auto bias = bias_terms(b);
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
      auto mixed = ngc_mix(b, alpha);
      for (std::size_t k = 0; k < 11; ++k) {
        double rhs = b.self_grad[k] + (1.0 - alpha) * bias.epsilon[k] + alpha * bias.omega[k];
        REQUIRE(std::abs(mixed[k] - rhs) <= 1e-12);
      }
    }
  }
}

TEST_CASE("mixing by hand") {
  GradientBundle b;
  b.self_id = 0;
  b.self_grad = {3.0};
  b.model_variant[1] = {6.0};
  b.data_variant[1] = {0.0};
  b.weights = {{0, 0.5}, {1, 0.5}};
  CHECK(ngc_mix(b, 0.0) == FlatGradient{4.5});
  CHECK(ngc_mix(b, 1.0) == FlatGradient{1.5});
  CHECK(ngc_mix(b, 0.5) == FlatGradient{3.0});
}

TEST_CASE("identical cross-gradients leave the self-gradient unchanged") {
  Rng rng(1);
  auto b = random_bundle(rng, 6);
  for (auto& [j, g] : b.model_variant) g = b.self_grad;
  for (auto& [j, g] : b.data_variant) g = b.self_grad;
  for (double alpha : {0.0, 0.3, 1.0}) {
    auto mixed = ngc_mix(b, alpha);
    for (std::size_t k = 0; k < 6; ++k) CHECK(mixed[k] == doctest::Approx(b.self_grad[k]));
  }
  auto bias = bias_terms(b);
  for (double v : bias.epsilon) CHECK(v == 0.0);
}

TEST_CASE("a cluster with zero coefficient is not read") {
  Rng rng(2);
  auto b = random_bundle(rng, 4);
  b.data_variant.clear();
  CHECK_NOTHROW(ngc_mix(b, 0.0));
  CHECK_THROWS_AS(ngc_mix(b, 0.5), ProtocolError);
  auto c = random_bundle(rng, 4);
  c.model_variant.clear();
  CHECK_NOTHROW(ngc_mix(c, 1.0));
  CHECK_THROWS_AS(ngc_mix(c, 0.0), ProtocolError);
}

TEST_CASE("bundle validation") {
  Rng rng(3);
  auto b = random_bundle(rng, 4);
  b.weights[1] = 0.5;
  CHECK_THROWS_AS(ngc_mix(b, 1.0), ConfigError);
  auto c = random_bundle(rng, 4);
  c.weights.erase(2);
  c.weights[1] = 0.5;
  c.weights[3] = 0.5;
  CHECK_THROWS_AS(ngc_mix(c, 1.0), ProtocolError);
  auto d = random_bundle(rng, 4);
  d.model_variant[1].pop_back();
  CHECK_THROWS_AS(ngc_mix(d, 0.0), ShapeError);
  auto e = random_bundle(rng, 4);
  e.weights = {{1, 0.25}, {2, 0.5}, {3, 0.25}};
  CHECK_NOTHROW(ngc_mix(e, 0.5));
  CHECK_THROWS_AS(bias_terms(e), UnsupportedError);
}

TEST_CASE("momentum update") {
  std::vector<double> v{1.0, -2.0};
  std::vector<double> g{0.5, 0.5};
  CHECK(momentum_update(v, g, 0.9, 0.1) == FlatGradient{0.9 - 0.05, -1.8 - 0.05});
  CHECK_THROWS_AS(momentum_update(v, std::vector<double>{1.0}, 0.9, 0.1), ShapeError);
}

TEST_CASE("gossip step") {
  // Three agents on a full graph, gamma = 1: everyone lands on x_tilde_i - x_i + mean.
  std::vector<double> w_row{1.0 / 3, 1.0 / 3, 1.0 / 3};
  ParamInbox inbox{{0, {3.0}}, {1, {6.0}}, {2, {0.0}}};
  auto out = gossip_step(std::vector<double>{3.0}, inbox, w_row, 0, 1.0);
  CHECK(out[0] == doctest::Approx(3.0));
  auto half = gossip_step(std::vector<double>{4.0}, inbox, w_row, 0, 0.5);
  CHECK(half[0] == doctest::Approx(4.0 + 0.5 * (3.0 - 3.0)));
  inbox.erase(2);
  CHECK_THROWS_AS(gossip_step(std::vector<double>{3.0}, inbox, w_row, 0, 1.0), ProtocolError);
}

TEST_CASE("learning rate schedule") {
  HyperParams hp;
  hp.eta = 0.1;
  CHECK(apply_lr_schedule(hp, 0, 60) == 0.1);
  CHECK(apply_lr_schedule(hp, 29, 60) == 0.1);
  CHECK(apply_lr_schedule(hp, 30, 60) == doctest::Approx(0.01));
  CHECK(apply_lr_schedule(hp, 44, 60) == doctest::Approx(0.01));
  CHECK(apply_lr_schedule(hp, 45, 60) == doctest::Approx(0.001));
  hp.lr_decay = false;
  CHECK(apply_lr_schedule(hp, 59, 60) == 0.1);
  CHECK_THROWS_AS(apply_lr_schedule(hp, 0, 0), ConfigError);
}

TEST_CASE("hyperparameter ranges") {
  HyperParams hp;
  CHECK_NOTHROW(hp.validate());
  hp.alpha = 1.5;
  CHECK_THROWS_AS(hp.validate(), ConfigError);
  hp = {};
  hp.beta = 1.0;
  CHECK_THROWS_AS(hp.validate(), ConfigError);
  hp = {};
  hp.gamma = 0.0;
  CHECK_THROWS_AS(hp.validate(), ConfigError);
  hp = {};
  hp.eta = -1.0;
  CHECK_THROWS_AS(hp.validate(), ConfigError);
  CHECK(parse_algorithm("compngc") == Algorithm::compngc);
  CHECK_THROWS_AS(parse_algorithm("cga"), ConfigError);
}

TEST_CASE("batches walk the shard without replacement") {
  std::vector<std::size_t> shard(10);
  std::iota(shard.begin(), shard.end(), 100);
  std::vector<std::size_t> nb{0, 1};
  auto a = make_agent(0, FlatParams(3, 0.0), shard, Rng(4), nb, true);
  CHECK(a.cross_error.size() == 1);
  CHECK(a.self_error.values.size() == 3);
  start_epoch(a);
  std::set<std::size_t> seen;
  for (int t = 0; t < 3; ++t) {
    auto b = draw_batch(a, 3);
    CHECK(b.size() == 3);
    seen.insert(b.begin(), b.end());
  }
  CHECK(seen.size() == 9);
  auto next = draw_batch(a, 3);  // only one row left: reshuffle
  CHECK(next.size() == 3);
  CHECK(draw_batch(a, 50).size() == 10);
  auto empty = make_agent(1, FlatParams(3), {}, Rng(1), nb, false);
  CHECK_THROWS_AS(draw_batch(empty, 3), ShapeError);
}
