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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "ngcsim/dataset.hpp"
#include "ngcsim/error.hpp"
#include "ngcsim/partition.hpp"

using namespace ngc;

namespace {

TopologySpec ring(std::size_t n) {
  TopologySpec t;
  t.num_agents = n;
  return t;
}

std::set<std::size_t> classes_of(const std::vector<std::size_t>& shard, const Dataset& d) {
  std::set<std::size_t> out;
  for (auto i : shard) out.insert(d.labels[i]);
  return out;
}

void check_cover(const Shards& shards, std::size_t n) {
  std::vector<std::size_t> all;
  for (const auto& s : shards) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  REQUIRE(all.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
}

}  // namespace

TEST_CASE("iid shards cover the data and differ by at most one") {
  auto d = generate_synthetic(3, 2, 7, 0.3, 1);  // 21 rows
  auto s = partition_iid(d, 4, 9);
  REQUIRE(s.size() == 4);
  CHECK(s[0].size() == 6);
  CHECK(s[3].size() == 5);
  check_cover(s, 21);
  CHECK(s == partition_iid(d, 4, 9));
  CHECK_FALSE(s == partition_iid(d, 4, 10));
  CHECK_THROWS_AS(partition_iid(d, 22, 1), PartitionError);
}

TEST_CASE("label skew with five agents and ten classes") {
  auto d = generate_synthetic(10, 4, 20, 0.3, 1);
  auto s = partition_label_skew(d, 5, ring(5), 3);
  check_cover(s, d.size());
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(classes_of(s[i], d) == std::set<std::size_t>{i, i + 5});
    CHECK(s[i].size() == 40);
  }
}

TEST_CASE("label skew with more agents than classes deals classes round robin") {
  auto d = generate_synthetic(10, 4, 20, 0.3, 1);
  auto s = partition_label_skew(d, 20, ring(20), 3);
  check_cover(s, d.size());
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(classes_of(s[i], d) == std::set<std::size_t>{i % 10});
    CHECK(s[i].size() == 10);
  }
}

TEST_CASE("no two adjacent agents share a class") {
  auto d = generate_synthetic(10, 4, 10, 0.3, 1);
  for (std::size_t n : {2, 3, 4, 5, 10, 20}) {
    auto s = partition_label_skew(d, n, ring(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
      auto a = classes_of(s[i], d);
      auto b = classes_of(s[(i + 1) % n], d);
      if ((i + 1) % n == i) continue;
      std::vector<std::size_t> both;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
      CHECK(both.empty());
    }
  }
}

TEST_CASE("infeasible label skews are rejected") {
  auto d = generate_synthetic(10, 4, 10, 0.3, 1);
  CHECK_THROWS_AS(partition_label_skew(d, 15, ring(15), 1), PartitionError);
  // Full graph: every agent neighbours every other, so shared classes are unavoidable
  // once agents outnumber classes.
  TopologySpec full;
  full.kind = TopologyKind::full;
  full.num_agents = 20;
  CHECK_THROWS_AS(partition_label_skew(d, 20, full, 1), PartitionError);
  // N = mC with too few samples per class for every agent to get one.
  auto tiny = generate_synthetic(2, 2, 1, 0.3, 1);
  CHECK_THROWS_AS(partition_label_skew(tiny, 4, ring(4), 1), PartitionError);
}

TEST_CASE("skew report counts classes per agent") {
  auto d = generate_synthetic(4, 2, 5, 0.3, 1);
  auto s = partition_label_skew(d, 2, ring(2), 1);
  auto r = skew_report(s, d);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == std::vector<std::size_t>{5, 0, 5, 0});
  CHECK(r[1] == std::vector<std::size_t>{0, 5, 0, 5});
  auto path = std::filesystem::temp_directory_path() / "ngcsim_skew.csv";
  write_skew_report_csv(r, path.string());
  std::ifstream in(path);
  std::string header, row0;
  std::getline(in, header);
  std::getline(in, row0);
  std::filesystem::remove(path);
  CHECK(header == "agent,class_0,class_1,class_2,class_3");
  CHECK(row0 == "0,5,0,5,0");
}

TEST_CASE("partition kind names") {
  CHECK(parse_partition_kind("iid") == PartitionKind::iid);
  CHECK(parse_partition_kind("noniid") == PartitionKind::label_skew);
  CHECK(to_string(PartitionKind::label_skew) == "label_skew");
  CHECK_THROWS_AS(parse_partition_kind("dirichlet"), ConfigError);
  auto d = generate_synthetic(10, 4, 20, 0.3, 1);
  CHECK(make_shards(PartitionKind::iid, d, ring(5), 2) == partition_iid(d, 5, 2));
}
