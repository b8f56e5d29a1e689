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
#include <random>
#include <span>
#include <vector>

namespace ngc {

// Stream purposes. A stream key is (master seed, purpose, index) and is mixed
// through splitmix64, so streams with different keys never share a state.
enum class StreamPurpose : std::uint64_t {
  agent_batches = 1,
  partition = 2,
  model_init = 3,
  dataset = 4,
  diagnostics = 5,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                          std::uint64_t index = 0);

// Engine plus the handful of draws the simulator needs. The distributions are
// written out here rather than taken from <random> so that draws are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }
  template <class T>
  void shuffle(std::vector<T>& values) {
    shuffle(std::span<T>(values));
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SeedStreams {
  std::vector<Rng> agents;
  Rng partition;
  Rng model_init;
};

// Per-agent batch streams plus the partition and initialization streams.
SeedStreams seed_streams(std::uint64_t master_seed, std::size_t num_agents);

}  // namespace ngc
