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

#include "ngcsim/algorithms.hpp"
#include "ngcsim/metrics.hpp"
#include "ngcsim/partition.hpp"
#include "ngcsim/topology.hpp"

namespace ngc {

// Either a synthetic Gaussian mixture or CSV files.
struct DatasetSpec {
  std::string source = "synthetic";  // "synthetic" or a CSV path
  std::string test_path;             // CSV only; empty evaluates on the training set
  std::size_t classes = 10;
  std::size_t dim = 16;
  std::size_t per_class = 200;
  std::size_t test_per_class = 100;
  double spread = 0.3;
  std::uint64_t data_seed = 1;

  bool operator==(const DatasetSpec&) const = default;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::ngc;
  TopologySpec topology;
  PartitionKind partition = PartitionKind::label_skew;
  Architecture architecture = Architecture::mlp;
  std::size_t hidden = 32;
  Activation activation = Activation::tanh;
  DatasetSpec dataset;
  HyperParams hp;
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t metric_every = 0;  // rounds between rows; 0 = once per epoch
  bool verbose = false;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

struct TrainTestData {
  Dataset train;
  Dataset test;
};

TrainTestData load_datasets(const DatasetSpec& spec);

// Byte counts use 32-bit floats on the wire; self-loops are free.
struct CommLedger {
  std::uint64_t param_bytes = 0;
  std::uint64_t crossgrad_bytes = 0;
  std::uint64_t messages = 0;
  std::uint64_t round_param_bytes = 0;
  std::uint64_t round_crossgrad_bytes = 0;
  std::uint64_t round_messages = 0;
  std::vector<std::uint64_t> sent_per_agent;

  explicit CommLedger(std::size_t num_agents = 0) : sent_per_agent(num_agents, 0) {}
  void begin_round();
  void record_params(std::size_t from, std::uint64_t bytes);
  void record_crossgrad(std::size_t from, std::uint64_t bytes);
  std::uint64_t total_bytes() const { return param_bytes + crossgrad_bytes; }
};

// Phase order within one synchronous round. Exchanges advance it and throw
// ProtocolError when called out of order.
class RoundProtocol {
 public:
  enum class Phase { idle, params_exchanged, gradients_computed, crossgrads_exchanged };

  void begin_round() { phase_ = Phase::idle; }
  void params_exchanged();
  void gradients_computed();
  void crossgrads_exchanged();
  Phase phase() const { return phase_; }

 private:
  Phase phase_ = Phase::idle;
};

// Phase one: every agent receives each neighbour's `values` entry (and its own).
std::vector<ParamInbox> exchange_params(const std::vector<FlatParams>& values,
                                        const MixingMatrix& w, CommLedger& ledger);

// Phase two: g^{ji} computed by agent i is delivered to agent j, where it is a
// data-variant cross-gradient. Compressed outboxes ship delta^{ji} and the
// receiver decodes it. A no-op returning empty inboxes when alpha == 0.
std::vector<std::map<std::size_t, FlatGradient>> exchange_cross_gradients(
    const std::vector<NgcOutbox>& outboxes, const MixingMatrix& w, bool compressed,
    double alpha, RoundProtocol& protocol, CommLedger& ledger);

struct RunResult {
  std::vector<MetricsRow> rows;
  std::vector<FlatParams> final_params;
  CommLedger ledger;
  Evaluation final_eval;
  std::size_t rounds = 0;
};

class Simulator {
 public:
  explicit Simulator(RunConfig config);
  Simulator(RunConfig config, TrainTestData data);

  // One synchronous round at the step size of the current epoch.
  void step();
  // Rounds until the end of the current epoch, recording metric rows.
  void run_epoch();
  RunResult run();

  MetricsRow metrics_row();

  const RunConfig& config() const { return config_; }
  const ModelSpec& model() const { return model_; }
  const Dataset& train() const { return data_.train; }
  const Dataset& test() const { return data_.test; }
  const MixingMatrix& mixing() const { return mixing_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  const CommLedger& ledger() const { return ledger_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }
  std::size_t round() const { return round_; }
  std::size_t epoch() const { return epoch_; }
  std::size_t rounds_per_epoch() const { return rounds_per_epoch_; }
  // Bundles of the last NGC/CompNGC round.
  const std::vector<GradientBundle>& last_bundles() const { return bundles_; }

 private:
  void dpsgd_step(double eta, std::vector<double>& losses);
  void ngc_step(double eta, std::vector<double>& losses);
  void record_row();
  void check_finite() const;

  RunConfig config_;
  TrainTestData data_;
  ModelSpec model_;
  MixingMatrix mixing_;
  bool uniform_weights_ = false;
  std::vector<AgentState> agents_;
  CommLedger ledger_;
  RoundProtocol protocol_;
  std::vector<GradientBundle> bundles_;
  std::vector<MetricsRow> rows_;

  std::size_t round_ = 0;
  std::size_t epoch_ = 0;
  std::size_t round_in_epoch_ = 0;
  std::size_t rounds_per_epoch_ = 1;

  // Accumulators since the last metric row.
  double loss_sum_ = 0.0;
  double eps_sum_ = 0.0;
  double omega_sum_ = 0.0;
  std::size_t loss_count_ = 0;
  std::size_t eps_count_ = 0;
  std::size_t omega_count_ = 0;
};

// Convenience wrapper around Simulator::run.
RunResult run(const RunConfig& config);

}  // namespace ngc
