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

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ngcsim/parallel.hpp"
#include "ngcsim/simulator.hpp"

namespace {

struct Timing {
  double seconds_per_round = 0.0;
  std::vector<ngc::FlatParams> params;
};

Timing time_rounds(ngc::RunConfig cfg, int workers, std::size_t rounds) {
  cfg.workers = workers;
  ngc::Simulator sim(cfg);
  sim.step();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t r = 0; r < rounds; ++r) sim.step();
  const auto t1 = std::chrono::steady_clock::now();
  Timing t;
  t.seconds_per_round = std::chrono::duration<double>(t1 - t0).count() / rounds;
  for (const auto& a : sim.agents()) t.params.push_back(a.params);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP round timing", "ngcsim_bench"};
  std::size_t agents = 16, rounds = 50, hidden = 64;
  int workers = ngc::max_workers();
  app.add_option("--agents", agents, "Ring size");
  app.add_option("--rounds", rounds, "Timed rounds per configuration");
  app.add_option("--hidden", hidden, "MLP hidden width");
  app.add_option("--workers", workers, "OpenMP worker count");
  CLI11_PARSE(app, argc, argv);

  std::printf("%-8s %8s %14s %14s %8s %s\n", "algo", "agents", "serial_ms", "parallel_ms",
              "speedup", "identical");
  for (auto algo : {ngc::Algorithm::dpsgd, ngc::Algorithm::ngc, ngc::Algorithm::compngc}) {
    ngc::RunConfig cfg;
    cfg.algorithm = algo;
    cfg.topology.num_agents = agents;
    cfg.hidden = hidden;
    cfg.dataset.per_class = 40 * agents;
    cfg.partition = ngc::PartitionKind::iid;
    auto serial = time_rounds(cfg, 1, rounds);
    auto parallel = time_rounds(cfg, workers, rounds);
    std::printf("%-8s %8zu %14.3f %14.3f %8.2f %s\n", ngc::to_string(algo).c_str(), agents,
                1e3 * serial.seconds_per_round, 1e3 * parallel.seconds_per_round,
                serial.seconds_per_round / parallel.seconds_per_round,
                serial.params == parallel.params ? "yes" : "NO");
  }
  return 0;
}
