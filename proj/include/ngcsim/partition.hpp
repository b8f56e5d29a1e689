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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ngcsim/dataset.hpp"
#include "ngcsim/topology.hpp"

namespace ngc {

enum class PartitionKind { iid, label_skew };

// One list of dataset row indices per agent.
using Shards = std::vector<std::vector<std::size_t>>;

Shards partition_iid(const Dataset& data, std::size_t num_agents, std::uint64_t seed);

// Complete label-wise skew. With N <= C agent i owns every class c with
// c mod N == i. With N = m*C the samples of class c are dealt round-robin to
// agents c, c + C, ..., c + (m-1)*C. Throws PartitionError when the rule is
// infeasible or when two adjacent agents end up sharing a class.
Shards partition_label_skew(const Dataset& data, std::size_t num_agents,
                            const TopologySpec& topology, std::uint64_t seed);

Shards make_shards(PartitionKind kind, const Dataset& data, const TopologySpec& topology,
                   std::uint64_t seed);

// N x C matrix of per-agent class counts.
std::vector<std::vector<std::size_t>> skew_report(const Shards& shards, const Dataset& data);

void write_skew_report_csv(const std::vector<std::vector<std::size_t>>& report,
                           const std::string& path);

std::string to_string(PartitionKind kind);
PartitionKind parse_partition_kind(const std::string& name);

}  // namespace ngc
