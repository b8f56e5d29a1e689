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
#include <filesystem>
#include <numeric>

#include "ngcsim/dataset.hpp"
#include "ngcsim/error.hpp"
#include "ngcsim/model.hpp"

using namespace ngc;

TEST_CASE("synthetic mixture shape and determinism") {
  auto d = generate_synthetic(10, 16, 20, 0.3, 4);
  CHECK(d.size() == 200);
  CHECK(d.num_features == 16);
  CHECK(d.num_classes == 10);
  CHECK(d.features.size() == 200 * 16);
  for (std::size_t c = 0; c < 10; ++c) {
    CHECK(std::count(d.labels.begin(), d.labels.end(), c) == 20);
  }
  CHECK(d == generate_synthetic(10, 16, 20, 0.3, 4));
  CHECK_FALSE(d == generate_synthetic(10, 16, 20, 0.3, 5));
  d.validate();
}

TEST_CASE("class centers are unit signed axes, then a circle") {
  auto c0 = class_center(0, 10, 16);
  auto c1 = class_center(1, 10, 16);
  auto c9 = class_center(9, 10, 16);
  CHECK(c0[0] == 1.0);
  CHECK(c1[0] == -1.0);
  CHECK(c9[4] == -1.0);
  auto circ = class_center(3, 12, 2);
  CHECK(circ[0] * circ[0] + circ[1] * circ[1] == doctest::Approx(1.0));
}

TEST_CASE("sample means approach the class centers") {
  auto d = generate_synthetic(4, 3, 2000, 0.5, 1);
  for (std::size_t c = 0; c < 4; ++c) {
    auto center = class_center(c, 4, 3);
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels[i] != c) continue;
      for (std::size_t f = 0; f < 3; ++f) mean[f] += d.row(i)[f] / 2000.0;
    }
    for (std::size_t f = 0; f < 3; ++f) CHECK(std::abs(mean[f] - center[f]) < 0.05);
  }
}

TEST_CASE("synthetic parameters are checked") {
  CHECK_THROWS_AS(generate_synthetic(1, 4, 10, 0.3, 1), ConfigError);
  CHECK_THROWS_AS(generate_synthetic(3, 0, 10, 0.3, 1), ConfigError);
  CHECK_THROWS_AS(generate_synthetic(3, 4, 10, 0.0, 1), ConfigError);
}

TEST_CASE("csv parsing") {
  auto d = parse_csv("0,1.5,2\n2, -1 ,3e-1\n\n1,0,0\n");
  CHECK(d.size() == 3);
  CHECK(d.num_features == 2);
  CHECK(d.num_classes == 3);
  CHECK(d.labels == std::vector<std::size_t>{0, 2, 1});
  CHECK(d.row(1)[0] == -1.0);
  CHECK(d.row(1)[1] == 0.3);
}

TEST_CASE("csv errors name the line") {
  try {
    parse_csv("0,1,2\n1,2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_csv("0,1,2\n1,2,x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_csv(""), ParseError);
  CHECK_THROWS_AS(parse_csv("-1,0.5\n"), ParseError);
  CHECK_THROWS_AS(load_csv("/nonexistent/data.csv"), Error);
}

TEST_CASE("csv save and load round trip exactly") {
  auto d = generate_synthetic(3, 5, 7, 0.4, 2);
  auto path = std::filesystem::temp_directory_path() / "ngcsim_dataset_rt.csv";
  save_csv(d, path);
  auto back = load_csv(path);
  std::filesystem::remove(path);
  CHECK(back == d);
}

TEST_CASE("select_rows keeps order") {
  auto d = parse_csv("0,1\n1,2\n2,3\n");
  std::vector<std::size_t> idx{2, 0};
  auto s = select_rows(d, idx);
  CHECK(s.labels == std::vector<std::size_t>{2, 0});
  CHECK(s.features == std::vector<double>{3, 1});
  CHECK(s.num_classes == 3);
}

TEST_CASE("two classes with tiny spread collapse to two distinct points") {
  auto d = generate_synthetic(2, 3, 10, 1e-9, 7);
  auto c0 = class_center(0, 2, 3);
  auto c1 = class_center(1, 2, 3);
  double sep = 0.0;
  for (std::size_t f = 0; f < 3; ++f) sep += std::abs(c0[f] - c1[f]);
  CHECK(sep > 0.5);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& c = d.labels[i] == 0 ? c0 : c1;
    for (std::size_t f = 0; f < 3; ++f) CHECK(std::abs(d.row(i)[f] - c[f]) < 1e-6);
  }
}

TEST_CASE("four well separated classes are linearly learnable") {
  auto d = generate_synthetic(4, 2, 500, 0.15, 11);
  ModelSpec s;
  s.architecture = Architecture::logistic;
  s.input_dim = 2;
  s.num_classes = 4;
  FlatParams p(s.param_count(), 0.0);
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), 0);
  for (int it = 0; it < 300; ++it) {
    auto g = loss_and_gradient(s, p, d, all).grad;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= 1.0 * g[k];
  }
  CHECK(evaluate(s, p, d).accuracy >= 0.95);
}
