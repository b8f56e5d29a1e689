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

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "ngcsim/compression.hpp"
#include "ngcsim/config.hpp"
#include "ngcsim/error.hpp"
#include "ngcsim/report.hpp"
#include "ngcsim/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

ngc::ModelSpec model_of(const ngc::RunConfig& rc) {
  ngc::ModelSpec m;
  m.architecture = rc.architecture;
  m.input_dim = rc.dataset.dim;
  m.hidden_dim = rc.hidden;
  m.num_classes = rc.dataset.classes;
  m.activation = rc.activation;
  return m;
}

// Wire sizes for the configured model and an error-feedback round trip.
int compress_check(const ngc::ExperimentConfig& cfg) {
  const std::size_t d = model_of(cfg.run).param_count();
  std::printf("%-10s %14s %14s %10s\n", "dim", "raw_bytes", "wire_bytes", "ratio");
  for (std::size_t dim : {d, std::size_t{100000}}) {
    const auto raw = ngc::raw_wire_bytes(dim);
    const auto wire = ngc::wire_size_bytes(dim);
    std::printf("%-10zu %14zu %14zu %10.3f\n", dim, raw, wire,
                static_cast<double>(raw) / static_cast<double>(wire));
  }

  ngc::Rng rng(cfg.run.seed);
  ngc::ErrorBuffer e(d);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> g(d);
    for (double& v : g) v = rng.normal();
    auto step = ngc::ef_step(g, e);
    auto delta = ngc::decompress(step.delta);
    for (std::size_t k = 0; k < d; ++k) {
      const double lhs = g[k] + e.values[k];
      const double rhs = delta[k] + step.next_error.values[k];
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    auto wire = ngc::decode_wire(ngc::encode_wire(step.delta));
    if (wire.dim != step.delta.dim || wire.signs != step.delta.signs) {
      std::printf("wire round trip: FAIL\n");
      return kExitRuntime;
    }
    e = std::move(step.next_error);
  }
  const bool ok = worst <= 1e-12;
  std::printf("error feedback identity: max rel err %.3g %s\n", worst, ok ? "ok" : "FAIL");
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  ngc::ParsedArgs parsed;
  try {
    parsed = ngc::parse_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const ngc::UsageError& e) {
    std::cerr << "ngcsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ngc::Error& e) {
    std::cerr << "ngcsim: " << e.what() << "\n";
    return kExitUsage;
  }
  if (parsed.wants_help) {
    std::cout << parsed.help_text;
    return kExitOk;
  }
  const auto& cfg = parsed.config;

  try {
    if (cfg.compress_check) return compress_check(cfg);
    if (cfg.run.verbose) std::cerr << ngc::format_config(cfg);
    auto summary = ngc::run_sweep(cfg.run, cfg.seeds, cfg.out_dir);
    if (cfg.run.verbose) {
      for (const auto& o : summary.outcomes) {
        std::fprintf(stderr, "seed %llu: acc %.4f loss %.4f\n",
                     static_cast<unsigned long long>(o.seed), o.final_acc, o.final_loss);
      }
    }
    std::cout << ngc::summary_json(summary);
  } catch (const ngc::SweepError& e) {
    std::cerr << "ngcsim: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "ngcsim: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
