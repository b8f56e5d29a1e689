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

#include "ngcsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ngcsim/error.hpp"
#include "ngcsim/parallel.hpp"

namespace ngc {

void RunConfig::validate() const {
  topology.validate();
  hp.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (architecture == Architecture::mlp && hidden < 1) {
    throw ConfigError("hidden must be >= 1 for the mlp model");
  }
  if (dataset.source == "synthetic") {
    if (dataset.classes < 2) throw ConfigError("classes must be >= 2");
    if (dataset.dim < 1) throw ConfigError("dim must be >= 1");
    if (dataset.per_class < 1) throw ConfigError("per_class must be >= 1");
    if (!(dataset.spread > 0.0)) throw ConfigError("spread must be positive");
  }
}

TrainTestData load_datasets(const DatasetSpec& spec) {
  TrainTestData out;
  if (spec.source == "synthetic") {
    out.train = generate_synthetic(spec.classes, spec.dim, spec.per_class, spec.spread,
                                   spec.data_seed);
    const std::size_t test_n = spec.test_per_class > 0 ? spec.test_per_class : spec.per_class;
    // Test draws come from a different dataset stream.
    out.test = generate_synthetic(spec.classes, spec.dim, test_n, spec.spread,
                                  splitmix64(spec.data_seed ^ 0x7e57ULL));
  } else {
    out.train = load_csv(spec.source);
    out.test = spec.test_path.empty() ? out.train : load_csv(spec.test_path);
    if (out.test.num_features != out.train.num_features) {
      throw ConfigError("test set feature count differs from the training set");
    }
    const std::size_t classes = std::max(out.train.num_classes, out.test.num_classes);
    out.train.num_classes = classes;
    out.test.num_classes = classes;
  }
  out.train.validate();
  out.test.validate();
  return out;
}

void CommLedger::begin_round() {
  round_param_bytes = 0;
  round_crossgrad_bytes = 0;
  round_messages = 0;
}

void CommLedger::record_params(std::size_t from, std::uint64_t bytes) {
  param_bytes += bytes;
  round_param_bytes += bytes;
  ++messages;
  ++round_messages;
  sent_per_agent.at(from) += bytes;
}

void CommLedger::record_crossgrad(std::size_t from, std::uint64_t bytes) {
  crossgrad_bytes += bytes;
  round_crossgrad_bytes += bytes;
  ++messages;
  ++round_messages;
  sent_per_agent.at(from) += bytes;
}

void RoundProtocol::params_exchanged() {
  if (phase_ != Phase::idle) throw ProtocolError("parameter exchange out of order");
  phase_ = Phase::params_exchanged;
}

void RoundProtocol::gradients_computed() {
  if (phase_ != Phase::params_exchanged) {
    throw ProtocolError("cross-gradients computed before the parameter exchange");
  }
  phase_ = Phase::gradients_computed;
}

void RoundProtocol::crossgrads_exchanged() {
  if (phase_ != Phase::gradients_computed) {
    throw ProtocolError("cross-gradient exchange before all agents finished phase one");
  }
  phase_ = Phase::crossgrads_exchanged;
}

std::vector<ParamInbox> exchange_params(const std::vector<FlatParams>& values,
                                        const MixingMatrix& w, CommLedger& ledger) {
  const std::size_t n = values.size();
  if (w.size() != n) throw ConfigError("mixing matrix size does not match agent count");
  std::vector<ParamInbox> inboxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : neighbors(w, i)) {
      inboxes[i].emplace(j, values[j]);
      if (j != i) ledger.record_params(j, raw_wire_bytes(values[j].size()));
    }
  }
  return inboxes;
}

std::vector<std::map<std::size_t, FlatGradient>> exchange_cross_gradients(
    const std::vector<NgcOutbox>& outboxes, const MixingMatrix& w, bool compressed,
    double alpha, RoundProtocol& protocol, CommLedger& ledger) {
  protocol.crossgrads_exchanged();
  const std::size_t n = outboxes.size();
  std::vector<std::map<std::size_t, FlatGradient>> inboxes(n);
  if (alpha == 0.0) return inboxes;

  // Receiver i collects g^{ij} from every neighbour j.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : neighbors(w, i)) {
      if (j == i) continue;
      const NgcOutbox& src = outboxes[j];
      if (compressed) {
        auto it = src.compressed.find(i);
        if (it == src.compressed.end()) {
          throw ProtocolError("agent " + std::to_string(j) +
                              " has no compressed cross-gradient for agent " +
                              std::to_string(i));
        }
        inboxes[i].emplace(j, decompress(it->second));
        ledger.record_crossgrad(j, wire_size_bytes(it->second));
      } else {
        auto it = src.model_variant.find(i);
        if (it == src.model_variant.end()) {
          throw ProtocolError("agent " + std::to_string(j) +
                              " has no cross-gradient for agent " + std::to_string(i));
        }
        inboxes[i].emplace(j, it->second);
        ledger.record_crossgrad(j, raw_wire_bytes(it->second.size()));
      }
    }
  }
  return inboxes;
}

Simulator::Simulator(RunConfig config)
    : Simulator(config, load_datasets(config.dataset)) {}

Simulator::Simulator(RunConfig config, TrainTestData data)
    : config_(std::move(config)), data_(std::move(data)) {
  config_.validate();
  data_.train.validate();
  data_.test.validate();

  model_.architecture = config_.architecture;
  model_.input_dim = data_.train.num_features;
  model_.hidden_dim = config_.architecture == Architecture::mlp ? config_.hidden : 0;
  model_.num_classes = std::max(data_.train.num_classes, data_.test.num_classes);
  model_.activation = config_.activation;
  model_.validate();

  mixing_ = build_mixing_matrix(config_.topology);
  const auto report = validate_doubly_stochastic(mixing_);
  if (!report.pass) throw ConfigError("mixing matrix is not symmetric doubly stochastic");

  const std::size_t n = mixing_.size();
  uniform_weights_ = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = neighbors(mixing_, i);
    const double u = 1.0 / static_cast<double>(nb.size());
    for (std::size_t j : nb) {
      if (std::abs(mixing_(i, j) - u) > 1e-12) uniform_weights_ = false;
    }
  }

  const Shards shards =
      make_shards(config_.partition, data_.train, config_.topology, config_.seed);
  SeedStreams streams = seed_streams(config_.seed, n);
  const FlatParams x0 = init_params(model_, streams.model_init);

  const bool compressed = config_.algorithm == Algorithm::compngc;
  agents_.reserve(n);
  std::size_t min_shard = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    min_shard = std::min(min_shard, shards[i].size());
    agents_.push_back(make_agent(i, x0, shards[i], std::move(streams.agents[i]),
                                 neighbors(mixing_, i), compressed));
  }
  const std::size_t b = std::min(config_.batch_size, min_shard);
  rounds_per_epoch_ = std::max<std::size_t>(1, min_shard / b);
  ledger_ = CommLedger(n);
}

void Simulator::check_finite() const {
  for (const auto& a : agents_) {
    for (double v : a.params) {
      if (!std::isfinite(v)) {
        throw DivergenceError("agent " + std::to_string(a.id) + " has non-finite parameters",
                              round_);
      }
    }
  }
}

void Simulator::dpsgd_step(double eta, std::vector<double>& losses) {
  const std::size_t n = agents_.size();
  std::vector<FlatParams> x_tilde(n);
  for_each_index(n, config_.workers, [&](std::size_t i) {
    const Batch batch = draw_batch(agents_[i], config_.batch_size);
    losses[i] = dpsgd_round_local(model_, data_.train, agents_[i], batch, config_.hp, eta,
                                  x_tilde[i]);
  });
  const auto inboxes = exchange_params(x_tilde, mixing_, ledger_);
  protocol_.params_exchanged();
  for_each_index(n, config_.workers, [&](std::size_t i) {
    gossip_into(agents_[i], x_tilde[i], mixing_, inboxes[i], config_.hp.gamma);
  });
  bundles_.clear();
}

void Simulator::ngc_step(double eta, std::vector<double>& losses) {
  const std::size_t n = agents_.size();
  const bool compressed = config_.algorithm == Algorithm::compngc;
  const HyperParams& hp = config_.hp;

  std::vector<FlatParams> snapshot(n);
  for (std::size_t i = 0; i < n; ++i) snapshot[i] = agents_[i].params;
  const auto inboxes = exchange_params(snapshot, mixing_, ledger_);
  protocol_.params_exchanged();

  std::vector<NgcOutbox> outboxes(n);
  for_each_index(n, config_.workers, [&](std::size_t i) {
    const Batch batch = draw_batch(agents_[i], config_.batch_size);
    outboxes[i] = ngc_round_compute(model_, data_.train, agents_[i], batch, inboxes[i],
                                    compressed);
    losses[i] = outboxes[i].loss;
  });
  protocol_.gradients_computed();

  auto data_variant =
      exchange_cross_gradients(outboxes, mixing_, compressed, hp.alpha, protocol_, ledger_);

  bundles_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    GradientBundle& b = bundles_[i];
    b.self_id = i;
    b.self_grad = std::move(outboxes[i].self_grad);
    b.model_variant = std::move(outboxes[i].model_variant);
    b.data_variant = std::move(data_variant[i]);
    for (std::size_t j : neighbors(mixing_, i)) b.weights.emplace(j, mixing_(i, j));
  }

  if (hp.gossip == GossipOperand::pre_round) {
    for_each_index(n, config_.workers, [&](std::size_t i) {
      ngc_round_apply(agents_[i], bundles_[i], hp, eta, mixing_, inboxes[i]);
    });
  } else {
    std::vector<FlatParams> x_tilde(n);
    for_each_index(n, config_.workers, [&](std::size_t i) {
      ngc_local_step(agents_[i], bundles_[i], hp, eta, x_tilde[i]);
    });
    const auto post = exchange_params(x_tilde, mixing_, ledger_);
    for_each_index(n, config_.workers, [&](std::size_t i) {
      gossip_into(agents_[i], x_tilde[i], mixing_, post[i], hp.gamma);
    });
  }

  if (!uniform_weights_) return;
  std::vector<double> eps(n, 0.0), omega(n, 0.0);
  const bool have_omega = hp.alpha != 0.0;
  for_each_index(n, config_.workers, [&](std::size_t i) {
    eps[i] = l1_norm(model_variance_bias(bundles_[i]));
    if (have_omega) omega[i] = l1_norm(data_variance_bias(bundles_[i]));
  });
  double eps_mean = 0.0, omega_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    eps_mean += eps[i];
    omega_mean += omega[i];
  }
  eps_sum_ += eps_mean / static_cast<double>(n);
  ++eps_count_;
  if (have_omega) {
    omega_sum_ += omega_mean / static_cast<double>(n);
    ++omega_count_;
  }
}

void Simulator::step() {
  ledger_.begin_round();
  protocol_.begin_round();
  const double eta =
      apply_lr_schedule(config_.hp, epoch_, std::max<std::size_t>(config_.epochs, 1));
  std::vector<double> losses(agents_.size(), 0.0);
  if (config_.algorithm == Algorithm::dpsgd) {
    dpsgd_step(eta, losses);
  } else {
    ngc_step(eta, losses);
  }
  check_finite();
  double mean = 0.0;
  for (double l : losses) mean += l;
  loss_sum_ += mean / static_cast<double>(losses.size());
  ++loss_count_;
  ++round_;
  ++round_in_epoch_;
}

MetricsRow Simulator::metrics_row() {
  MetricsRow row;
  row.round = round_;
  row.epoch = epoch_;
  if (loss_count_ > 0) {
    row.train_loss = loss_sum_ / static_cast<double>(loss_count_);
  } else {
    // No rounds yet: full-shard loss at the current parameters.
    double total = 0.0;
    for (const auto& a : agents_) total += batch_loss(model_, a.params, data_.train, a.shard);
    row.train_loss = total / static_cast<double>(agents_.size());
  }
  const FlatParams xbar = consensus_model(agents_);
  const Evaluation ev = evaluate(model_, xbar, data_.test);
  row.val_loss = ev.loss;
  row.val_acc = ev.accuracy;
  row.consensus_error = consensus_error(agents_);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.eps_l1 = eps_count_ > 0 ? eps_sum_ / static_cast<double>(eps_count_) : nan;
  row.omega_l1 = omega_count_ > 0 ? omega_sum_ / static_cast<double>(omega_count_) : nan;
  row.param_bytes = ledger_.param_bytes;
  row.crossgrad_bytes = ledger_.crossgrad_bytes;
  if (config_.verbose) {
    for (const auto& a : agents_) {
      row.agent_acc.push_back(evaluate(model_, a.params, data_.test).accuracy);
    }
  }
  return row;
}

void Simulator::record_row() {
  rows_.push_back(metrics_row());
  loss_sum_ = eps_sum_ = omega_sum_ = 0.0;
  loss_count_ = eps_count_ = omega_count_ = 0;
}

void Simulator::run_epoch() {
  for (auto& a : agents_) start_epoch(a);
  round_in_epoch_ = 0;
  for (std::size_t r = 0; r < rounds_per_epoch_; ++r) {
    step();
    if (config_.metric_every > 0 && round_ % config_.metric_every == 0) {
      record_row();
    }
  }
  ++epoch_;
  if (config_.metric_every == 0) record_row();
}

RunResult Simulator::run() {
  if (config_.epochs > 0 && rows_.empty()) record_row();
  while (epoch_ < config_.epochs) run_epoch();
  RunResult result;
  result.rows = rows_;
  for (const auto& a : agents_) result.final_params.push_back(a.params);
  result.ledger = ledger_;
  result.final_eval = evaluate(model_, consensus_model(agents_), data_.test);
  result.rounds = round_;
  return result;
}

RunResult run(const RunConfig& config) { return Simulator(config).run(); }

}  // namespace ngc
