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

#include "ngcsim/partition.hpp"

#include <fstream>
#include <numeric>

#include "ngcsim/error.hpp"
#include "ngcsim/rng.hpp"

namespace ngc {

Shards partition_iid(const Dataset& data, std::size_t num_agents, std::uint64_t seed) {
  if (num_agents == 0) throw ConfigError("partition needs at least one agent");
  if (data.size() < num_agents) {
    throw PartitionError("cannot split " + std::to_string(data.size()) +
                         " samples across " + std::to_string(num_agents) + " agents");
  }
  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, StreamPurpose::partition));
  rng.shuffle(perm);

  Shards shards(num_agents);
  const std::size_t base = data.size() / num_agents;
  const std::size_t extra = data.size() % num_agents;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < num_agents; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    shards[i].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                     perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return shards;
}

Shards partition_label_skew(const Dataset& data, std::size_t num_agents,
                            const TopologySpec& topology, std::uint64_t seed) {
  const std::size_t C = data.num_classes;
  const std::size_t N = num_agents;
  if (C < 2) throw PartitionError("label skew needs at least 2 classes");
  if (N == 0) throw ConfigError("partition needs at least one agent");
  if (topology.num_agents != N) {
    throw ConfigError("topology agent count does not match partition agent count");
  }
  if (N > C && N % C != 0) {
    throw PartitionError("label skew needs N <= C or N a multiple of C (N=" +
                         std::to_string(N) + ", C=" + std::to_string(C) + ")");
  }

  std::vector<std::vector<std::size_t>> by_class(C);
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
  Rng rng(derive_seed(seed, StreamPurpose::partition));
  for (auto& members : by_class) rng.shuffle(members);

  Shards shards(N);
  if (N <= C) {
    for (std::size_t c = 0; c < C; ++c) {
      auto& dst = shards[c % N];
      dst.insert(dst.end(), by_class[c].begin(), by_class[c].end());
    }
  } else {
    const std::size_t copies = N / C;
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t k = 0; k < by_class[c].size(); ++k) {
        shards[c + (k % copies) * C].push_back(by_class[c][k]);
      }
    }
  }

  for (std::size_t i = 0; i < N; ++i) {
    if (shards[i].empty()) {
      throw PartitionError("agent " + std::to_string(i) + " received no samples");
    }
  }

  // Adjacent agents must hold disjoint class sets.
  const auto w = build_mixing_matrix(topology);
  std::vector<std::vector<bool>> owns(N, std::vector<bool>(C, false));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t idx : shards[i]) owns[i][data.labels[idx]] = true;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      if (w(i, j) <= 0.0) continue;
      for (std::size_t c = 0; c < C; ++c) {
        if (owns[i][c] && owns[j][c]) {
          throw PartitionError("adjacent agents " + std::to_string(i) + " and " +
                               std::to_string(j) + " share class " + std::to_string(c));
        }
      }
    }
  }
  return shards;
}

Shards make_shards(PartitionKind kind, const Dataset& data, const TopologySpec& topology,
                   std::uint64_t seed) {
  if (kind == PartitionKind::iid) return partition_iid(data, topology.num_agents, seed);
  return partition_label_skew(data, topology.num_agents, topology, seed);
}

std::vector<std::vector<std::size_t>> skew_report(const Shards& shards, const Dataset& data) {
  std::vector<std::vector<std::size_t>> counts(shards.size(),
                                               std::vector<std::size_t>(data.num_classes, 0));
  for (std::size_t i = 0; i < shards.size(); ++i)
    for (std::size_t idx : shards[i]) ++counts[i][data.labels[idx]];
  return counts;
}

void write_skew_report_csv(const std::vector<std::vector<std::size_t>>& report,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "agent";
  const std::size_t C = report.empty() ? 0 : report.front().size();
  for (std::size_t c = 0; c < C; ++c) out << ",class_" << c;
  out << '\n';
  for (std::size_t i = 0; i < report.size(); ++i) {
    out << i;
    for (std::size_t v : report[i]) out << ',' << v;
    out << '\n';
  }
}

std::string to_string(PartitionKind kind) {
  return kind == PartitionKind::iid ? "iid" : "label_skew";
}

PartitionKind parse_partition_kind(const std::string& name) {
  if (name == "iid") return PartitionKind::iid;
  if (name == "label_skew" || name == "noniid" || name == "non-iid") {
    return PartitionKind::label_skew;
  }
  throw ConfigError("unknown partition '" + name + "'");
}

}  // namespace ngc
