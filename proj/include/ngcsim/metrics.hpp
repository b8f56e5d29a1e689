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
#include <span>
#include <vector>

#include "ngcsim/algorithms.hpp"
#include "ngcsim/partition.hpp"

namespace ngc {

// One CSV row. Byte counters are cumulative. Bias norms are NaN when the
// round's bundles cannot provide them (D-PSGD, alpha = 0 for omega, or
// non-uniform neighbourhood weights), and on the initial row.
struct MetricsRow {
  std::size_t round = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double consensus_error = 0.0;
  double eps_l1 = 0.0;
  double omega_l1 = 0.0;
  std::uint64_t param_bytes = 0;
  std::uint64_t crossgrad_bytes = 0;
  std::vector<double> agent_acc;  // filled in verbose runs only
};

// Uniform average, computed as x_0 + mean(x_i - x_0) so that identical
// agents give back x_0 exactly.
FlatParams consensus_model(std::span<const FlatParams> params);
FlatParams consensus_model(std::span<const AgentState> agents);

// (1/N) sum_i ||xbar - x_i||^2.
double consensus_error(std::span<const FlatParams> params);
double consensus_error(std::span<const AgentState> agents);

struct BiasNorms {
  double eps_l1 = 0.0;
  double omega_l1 = 0.0;
};

// Agent-averaged L1 norms of the model and data variance biases.
BiasNorms bias_norms(std::span<const GradientBundle> bundles);

double l1_norm(std::span<const double> v);

struct DeviationReport {
  double lhs = 0.0;            // E || (1/N) sum_i (gtilde_i - g_i) ||^2
  double per_agent_lhs = 0.0;  // (1/N) sum_i E || gtilde_i - g_i ||^2, informational
  double sigma_sq = 0.0;       // max_i E || grad F_i(x; d) - grad f_i(x) ||^2
  double zeta_sq = 0.0;        // max_i || grad f_i(x) - grad F(x) ||^2
  double bound = 0.0;          // 4 (sigma^2 / N + zeta^2)
  std::size_t samples = 0;
  bool pass = false;           // lhs <= slack * bound
};

inline constexpr double kDeviationSlack = 1.2;
inline constexpr std::size_t kDeviationMinSamples = 100;

// Monte-Carlo check of the NGC gradient-deviation bound at alpha = 1 with
// every agent at the common point `params`. Throws ConfigError when
// sample_count < 100.
DeviationReport deviation_diagnostic(const ModelSpec& spec, const Dataset& train,
                               const Shards& shards, const MixingMatrix& w,
                               std::span<const double> params, std::size_t batch_size,
                               std::size_t sample_count, std::uint64_t seed);

// Same check driven from agent states: the common point is the consensus
// model of the agents.
DeviationReport deviation_diagnostic(const ModelSpec& spec, const Dataset& train,
                               std::span<const AgentState> agents, const MixingMatrix& w,
                               std::size_t batch_size, std::size_t sample_count,
                               std::uint64_t seed);

}  // namespace ngc
