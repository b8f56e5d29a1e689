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
#include <filesystem>
#include <string>
#include <vector>

#include "ngcsim/config.hpp"
#include "ngcsim/error.hpp"
#include "ngcsim/metrics.hpp"
#include "ngcsim/simulator.hpp"

namespace ngc {

inline constexpr const char* kMetricsVersionLine = "# ngcsim metrics v1";
inline constexpr const char* kMetricsHeader =
    "round,epoch,train_loss,val_loss,val_acc,consensus_error,eps_l1,omega_l1,param_bytes,"
    "crossgrad_bytes";

std::string format_metrics_csv(const std::vector<MetricsRow>& rows);
// Throws Error naming the path when the file cannot be written.
void emit_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);
// agent_acc is not part of the file and comes back empty.
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double final_acc = 0.0;
  double final_loss = 0.0;
  std::uint64_t total_bytes_per_agent = 0;
};

struct SweepSummary {
  std::string algorithm;
  std::string topology;
  std::size_t agents = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<SeedOutcome> outcomes;
  double final_acc_mean = 0.0;
  double final_acc_std = 0.0;  // population
  double final_loss_mean = 0.0;
  double final_loss_std = 0.0;
  std::uint64_t total_bytes_per_agent = 0;  // mean over seeds and agents
};

// Runs every seed; per-seed CSVs go to out_dir/seed_<s>.csv when out_dir is
// non-empty, together with config.txt and summary.json. Throws SweepError if
// any seed aborts.
SweepSummary run_sweep(const RunConfig& config, const std::vector<std::uint64_t>& seeds,
                       const std::filesystem::path& out_dir = {});

class SweepError : public Error {
 public:
  SweepError(const std::string& what, std::vector<std::uint64_t> completed)
      : Error(what), completed_(std::move(completed)) {}
  const std::vector<std::uint64_t>& completed() const { return completed_; }

 private:
  std::vector<std::uint64_t> completed_;
};

std::string summary_json(const SweepSummary& summary);

// Per-seed accuracy differences (a - b), in percentage points.
struct GapRow {
  std::uint64_t seed = 0;
  double acc_a = 0.0;
  double acc_b = 0.0;
  double gap = 0.0;
};
std::vector<GapRow> accuracy_gaps(const SweepSummary& a, const SweepSummary& b);
std::string format_gap_table(const SweepSummary& a, const SweepSummary& b);

}  // namespace ngc
