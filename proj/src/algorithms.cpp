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

#include "ngcsim/algorithms.hpp"

#include <cmath>

#include "ngcsim/error.hpp"

namespace ngc {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::dpsgd: return "dpsgd";
    case Algorithm::ngc: return "ngc";
    case Algorithm::compngc: return "compngc";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "dpsgd" || name == "d-psgd") return Algorithm::dpsgd;
  if (name == "ngc") return Algorithm::ngc;
  if (name == "compngc") return Algorithm::compngc;
  throw ConfigError("unknown algorithm '" + name + "'");
}

void HyperParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must lie in [0, 1)");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
}

double apply_lr_schedule(const HyperParams& hp, std::size_t epoch, std::size_t total_epochs) {
  if (total_epochs < 1) throw ConfigError("total_epochs must be >= 1");
  if (!hp.lr_decay) return hp.eta;
  if (4 * epoch >= 3 * total_epochs) return hp.eta * 0.01;
  if (2 * epoch >= total_epochs) return hp.eta * 0.1;
  return hp.eta;
}

namespace {

void check_weights(const GradientBundle& b) {
  if (!b.weights.contains(b.self_id)) {
    throw ProtocolError("bundle weights do not include the agent itself");
  }
  double total = 0.0;
  for (const auto& [j, w] : b.weights) total += w;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("neighbourhood weights sum to " + std::to_string(total) +
                      ", expected 1");
  }
}

const FlatGradient& entry(const GradientBundle& b,
                          const std::map<std::size_t, FlatGradient>& cluster,
                          std::size_t j, const char* name) {
  if (j == b.self_id) return b.self_grad;
  auto it = cluster.find(j);
  if (it == cluster.end()) {
    throw ProtocolError(std::string(name) + " cross-gradient from agent " +
                        std::to_string(j) + " is missing");
  }
  if (it->second.size() != b.self_grad.size()) {
    throw ShapeError(std::string(name) + " cross-gradient from agent " + std::to_string(j) +
                     " has the wrong dimension");
  }
  return it->second;
}

// sum_{j in N(i)} w_ij * cluster_j, accumulated in ascending j.
void weighted_cluster_sum(const GradientBundle& b,
                          const std::map<std::size_t, FlatGradient>& cluster,
                          const char* name, std::vector<double>& out) {
  out.assign(b.self_grad.size(), 0.0);
  for (const auto& [j, w] : b.weights) {
    const auto& g = entry(b, cluster, j, name);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * g[k];
  }
}

void check_uniform(const GradientBundle& b) {
  const double m = static_cast<double>(b.weights.size());
  for (const auto& [j, w] : b.weights) {
    if (std::abs(w - 1.0 / m) > 1e-12) {
      throw UnsupportedError("bias terms are defined for uniform neighbourhood weights only");
    }
  }
}

FlatGradient mean_deviation(const GradientBundle& b,
                            const std::map<std::size_t, FlatGradient>& cluster,
                            const char* name) {
  const double inv_m = 1.0 / static_cast<double>(b.weights.size());
  FlatGradient out(b.self_grad.size(), 0.0);
  for (const auto& [j, w] : b.weights) {
    if (j == b.self_id) continue;
    const auto& g = entry(b, cluster, j, name);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += g[k] - b.self_grad[k];
  }
  for (double& v : out) v *= inv_m;
  return out;
}

}  // namespace

FlatGradient ngc_mix(const GradientBundle& bundle, double alpha) {
  check_weights(bundle);
  const std::size_t d = bundle.self_grad.size();
  FlatGradient out(d, 0.0);
  std::vector<double> sum;
  if (alpha != 1.0) {
    weighted_cluster_sum(bundle, bundle.model_variant, "model-variant", sum);
    for (std::size_t k = 0; k < d; ++k) out[k] = (1.0 - alpha) * sum[k];
  }
  if (alpha != 0.0) {
    weighted_cluster_sum(bundle, bundle.data_variant, "data-variant", sum);
    for (std::size_t k = 0; k < d; ++k) out[k] += alpha * sum[k];
  }
  return out;
}

FlatGradient model_variance_bias(const GradientBundle& bundle) {
  check_weights(bundle);
  check_uniform(bundle);
  return mean_deviation(bundle, bundle.model_variant, "model-variant");
}

FlatGradient data_variance_bias(const GradientBundle& bundle) {
  check_weights(bundle);
  check_uniform(bundle);
  return mean_deviation(bundle, bundle.data_variant, "data-variant");
}

BiasTerms bias_terms(const GradientBundle& bundle) {
  return {model_variance_bias(bundle), data_variance_bias(bundle)};
}

FlatGradient momentum_update(std::span<const double> v, std::span<const double> mixed,
                             double beta, double eta) {
  if (v.size() != mixed.size()) throw ShapeError("momentum and gradient dimensions differ");
  FlatGradient out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = beta * v[k] - eta * mixed[k];
  return out;
}

FlatParams gossip_step(std::span<const double> x_tilde, const ParamInbox& params,
                       std::span<const double> w_row, std::size_t self, double gamma) {
  FlatParams out(x_tilde.begin(), x_tilde.end());
  for (std::size_t j = 0; j < w_row.size(); ++j) {
    const double coeff = w_row[j] - (j == self ? 1.0 : 0.0);
    if (w_row[j] <= 0.0 && j != self) continue;
    auto it = params.find(j);
    if (it == params.end()) {
      throw ProtocolError("gossip operand from agent " + std::to_string(j) + " is missing");
    }
    const auto& xj = it->second;
    if (xj.size() != out.size()) throw ShapeError("gossip operand has the wrong dimension");
    const double c = gamma * coeff;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * xj[k];
  }
  return out;
}

AgentState make_agent(std::size_t id, FlatParams params, std::vector<std::size_t> shard,
                      Rng rng, std::span<const std::size_t> neighbor_ids, bool compressed) {
  AgentState a;
  a.id = id;
  const std::size_t d = params.size();
  a.params = std::move(params);
  a.momentum.assign(d, 0.0);
  a.shard = std::move(shard);
  a.rng = std::move(rng);
  if (compressed) {
    a.self_error = ErrorBuffer(d);
    for (std::size_t j : neighbor_ids) {
      if (j != id) a.cross_error.emplace(j, ErrorBuffer(d));
    }
  }
  return a;
}

void start_epoch(AgentState& agent) {
  agent.order = agent.shard;
  agent.rng.shuffle(agent.order);
  agent.cursor = 0;
}

Batch draw_batch(AgentState& agent, std::size_t batch_size) {
  if (agent.shard.empty()) throw ShapeError("agent has an empty shard");
  const std::size_t b = std::min(std::max<std::size_t>(batch_size, 1), agent.shard.size());
  if (agent.order.empty() || agent.cursor + b > agent.order.size()) start_epoch(agent);
  Batch batch(agent.order.begin() + static_cast<std::ptrdiff_t>(agent.cursor),
              agent.order.begin() + static_cast<std::ptrdiff_t>(agent.cursor + b));
  agent.cursor += b;
  return batch;
}

NgcOutbox ngc_round_compute(const ModelSpec& spec, const Dataset& train, AgentState& agent,
                            const Batch& batch, const ParamInbox& params, bool compress) {
  NgcOutbox out;
  auto self = loss_and_gradient(spec, agent.params, train, batch);
  out.loss = self.loss;
  out.self_grad = std::move(self.grad);

  for (const auto& [j, xj] : params) {
    if (j == agent.id) continue;
    out.model_variant.emplace(j, cross_gradient(spec, xj, train, batch));
  }

  if (compress) {
    out.self_grad = decompress(ef_compress(out.self_grad, agent.self_error));
    for (auto& [j, g] : out.model_variant) {
      auto it = agent.cross_error.find(j);
      if (it == agent.cross_error.end()) {
        throw ProtocolError("agent " + std::to_string(agent.id) +
                            " has no error buffer for neighbour " + std::to_string(j));
      }
      CompressedTensor delta = ef_compress(g, it->second);
      decompress_into(delta, g);
      out.compressed.emplace(j, std::move(delta));
    }
  }
  return out;
}

FlatGradient ngc_local_step(AgentState& agent, const GradientBundle& bundle,
                            const HyperParams& hp, double eta, FlatParams& x_tilde) {
  FlatGradient mixed = ngc_mix(bundle, hp.alpha);
  agent.momentum = momentum_update(agent.momentum, mixed, hp.beta, eta);
  x_tilde.resize(agent.params.size());
  for (std::size_t k = 0; k < x_tilde.size(); ++k) {
    x_tilde[k] = agent.params[k] + agent.momentum[k];
  }
  return mixed;
}

void gossip_into(AgentState& agent, std::span<const double> x_tilde, const MixingMatrix& w,
                 const ParamInbox& gossip_params, double gamma) {
  agent.params = gossip_step(x_tilde, gossip_params, w.row(agent.id), agent.id, gamma);
}

FlatGradient ngc_round_apply(AgentState& agent, const GradientBundle& bundle,
                             const HyperParams& hp, double eta, const MixingMatrix& w,
                             const ParamInbox& gossip_params) {
  FlatParams x_tilde;
  FlatGradient mixed = ngc_local_step(agent, bundle, hp, eta, x_tilde);
  gossip_into(agent, x_tilde, w, gossip_params, hp.gamma);
  return mixed;
}

double dpsgd_round_local(const ModelSpec& spec, const Dataset& train, AgentState& agent,
                         const Batch& batch, const HyperParams& hp, double eta,
                         FlatParams& x_tilde) {
  auto lg = loss_and_gradient(spec, agent.params, train, batch);
  agent.momentum = momentum_update(agent.momentum, lg.grad, hp.beta, eta);
  x_tilde.resize(agent.params.size());
  for (std::size_t k = 0; k < x_tilde.size(); ++k) {
    x_tilde[k] = agent.params[k] + agent.momentum[k];
  }
  return lg.loss;
}

}  // namespace ngc
