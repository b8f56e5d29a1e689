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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ngcsim/compression.hpp"
#include "ngcsim/dataset.hpp"
#include "ngcsim/model.hpp"
#include "ngcsim/rng.hpp"
#include "ngcsim/topology.hpp"

namespace ngc {

enum class Algorithm { dpsgd, ngc, compngc };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// Which parameters NGC gossips with: the neighbours' pre-round values (as in
// the NGC update rule) or their post-update values (as D-PSGD does).
enum class GossipOperand { pre_round, post_update };

struct HyperParams {
  double alpha = 1.0;  // NGC mixing weight, [0, 1]
  double beta = 0.9;   // momentum, [0, 1)
  double eta = 0.01;   // step size, > 0
  double gamma = 0.5;  // gossip averaging rate, (0, 1]
  bool lr_decay = true;
  GossipOperand gossip = GossipOperand::pre_round;

  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

// Step size for an epoch: eta, then eta/10 from 50% and eta/100 from 75% of
// training when lr_decay is set.
double apply_lr_schedule(const HyperParams& hp, std::size_t epoch, std::size_t total_epochs);

// Everything agent i holds after both communication phases.
struct GradientBundle {
  std::size_t self_id = 0;
  FlatGradient self_grad;                         // g^{ii}
  std::map<std::size_t, FlatGradient> model_variant;  // j -> g^{ji}, this agent's data
  std::map<std::size_t, FlatGradient> data_variant;   // j -> g^{ij}, j's data
  std::map<std::size_t, double> weights;              // j -> w_ij over N(i), self included
};

// (1 - alpha) * sum_j w_ji g^{ji} + alpha * sum_j w_ij g^{ij}, where the j = i
// term of both sums is the self-gradient. A cluster whose coefficient is zero
// is not read, so its map may be empty.
FlatGradient ngc_mix(const GradientBundle& bundle, double alpha);

struct BiasTerms {
  FlatGradient epsilon;  // model variance bias
  FlatGradient omega;    // data variance bias
};

// Requires uniform weights 1/m; throws UnsupportedError otherwise.
BiasTerms bias_terms(const GradientBundle& bundle);
FlatGradient model_variance_bias(const GradientBundle& bundle);
FlatGradient data_variance_bias(const GradientBundle& bundle);

FlatGradient momentum_update(std::span<const double> v, std::span<const double> mixed,
                             double beta, double eta);

using ParamInbox = std::map<std::size_t, FlatParams>;

// x_tilde + gamma * sum_{j in N(i)} (w_ij - I_ij) x_j. `params` must hold an
// entry for every j in N(i), including i itself.
FlatParams gossip_step(std::span<const double> x_tilde, const ParamInbox& params,
                       std::span<const double> w_row, std::size_t self, double gamma);

struct AgentState {
  std::size_t id = 0;
  FlatParams params;
  FlatGradient momentum;
  std::vector<std::size_t> shard;  // rows of the training set
  ErrorBuffer self_error;                          // e^{ii}
  std::map<std::size_t, ErrorBuffer> cross_error;  // j -> e^{ji}
  Rng rng;
  std::vector<std::size_t> order;
  std::size_t cursor = 0;
};

AgentState make_agent(std::size_t id, FlatParams params, std::vector<std::size_t> shard,
                      Rng rng, std::span<const std::size_t> neighbor_ids, bool compressed);

// Reshuffles the shard for a new epoch.
void start_epoch(AgentState& agent);

// Next `batch_size` shard rows without replacement; reshuffles when the
// shard is exhausted. Batches are clipped to the shard size.
Batch draw_batch(AgentState& agent, std::size_t batch_size);

// Stage one of an NGC or CompNGC round, run after the parameter exchange.
struct NgcOutbox {
  double loss = 0.0;
  FlatGradient self_grad;                           // g^{ii}, or decompressed delta^{ii}
  std::map<std::size_t, FlatGradient> model_variant;  // j -> g^{ji} (decompressed if compressed)
  std::map<std::size_t, CompressedTensor> compressed;  // j -> delta^{ji}; CompNGC only
};

// Self-gradient plus the model-variant cross-gradient for every neighbour in
// `params` (which includes this agent's own entry). With `compress` set every
// stream is error-feedback compressed through the agent's buffers.
NgcOutbox ngc_round_compute(const ModelSpec& spec, const Dataset& train, AgentState& agent,
                            const Batch& batch, const ParamInbox& params, bool compress);

// Stage two: mixing, momentum, local step and gossip. `gossip_params` holds
// the operands for the gossip sum. Returns the mixed gradient.
FlatGradient ngc_round_apply(AgentState& agent, const GradientBundle& bundle,
                             const HyperParams& hp, double eta, const MixingMatrix& w,
                             const ParamInbox& gossip_params);

// NGC gossips after its local step in two flavours; the post-update one needs
// x_tilde published before gossip. Split helpers for that path.
FlatGradient ngc_local_step(AgentState& agent, const GradientBundle& bundle,
                            const HyperParams& hp, double eta, FlatParams& x_tilde);
void gossip_into(AgentState& agent, std::span<const double> x_tilde, const MixingMatrix& w,
                 const ParamInbox& gossip_params, double gamma);

// D-PSGD stage one: gradient, momentum and local step. Returns the batch loss
// and writes the post-update parameters to `x_tilde`.
double dpsgd_round_local(const ModelSpec& spec, const Dataset& train, AgentState& agent,
                         const Batch& batch, const HyperParams& hp, double eta,
                         FlatParams& x_tilde);

}  // namespace ngc
