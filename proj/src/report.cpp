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

#include "ngcsim/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ngcsim/error.hpp"

namespace ngc {

namespace {

std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double to_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

std::uint64_t to_u64(const std::string& s, std::size_t line) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("bad integer '" + s + "'", line);
  return v;
}

// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

std::string format_metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string(kMetricsVersionLine) + "\n" + kMetricsHeader + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.round) + ',' + std::to_string(r.epoch) + ',' + g9(r.train_loss) +
           ',' + g9(r.val_loss) + ',' + g9(r.val_acc) + ',' + g9(r.consensus_error) + ',' +
           g9(r.eps_l1) + ',' + g9(r.omega_l1) + ',' + std::to_string(r.param_bytes) + ',' +
           std::to_string(r.crossgrad_bytes) + '\n';
  }
  return out;
}

void emit_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  write_text(path, format_metrics_csv(rows));
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  std::vector<MetricsRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kMetricsHeader) throw ParseError("unexpected metrics header", line_no);
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw ParseError("expected 10 fields", line_no);
    MetricsRow r;
    r.round = to_u64(f[0], line_no);
    r.epoch = to_u64(f[1], line_no);
    r.train_loss = to_real(f[2], line_no);
    r.val_loss = to_real(f[3], line_no);
    r.val_acc = to_real(f[4], line_no);
    r.consensus_error = to_real(f[5], line_no);
    r.eps_l1 = to_real(f[6], line_no);
    r.omega_l1 = to_real(f[7], line_no);
    r.param_bytes = to_u64(f[8], line_no);
    r.crossgrad_bytes = to_u64(f[9], line_no);
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("missing metrics header", line_no);
  return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  return parse_metrics_csv(read_text(path));
}

SweepSummary run_sweep(const RunConfig& config, const std::vector<std::uint64_t>& seeds,
                       const std::filesystem::path& out_dir) {
  if (seeds.empty()) throw ConfigError("a sweep needs at least one seed");
  SweepSummary s;
  s.algorithm = to_string(config.algorithm);
  s.topology = to_string(config.topology.kind);
  s.agents = config.topology.num_agents;
  s.seeds = seeds;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    ExperimentConfig echo;
    echo.run = config;
    echo.seeds = seeds;
    echo.out_dir = out_dir.string();
    write_text(out_dir / "config.txt", format_config(echo));
  }

  std::vector<std::uint64_t> completed;
  for (std::uint64_t seed : seeds) {
    RunConfig rc = config;
    rc.seed = seed;
    RunResult result;
    try {
      result = run(rc);
    } catch (const std::exception& e) {
      std::string done;
      for (auto c : completed) done += (done.empty() ? "" : ",") + std::to_string(c);
      throw SweepError("seed " + std::to_string(seed) + " aborted (" + e.what() +
                           "); completed seeds: [" + done + "]",
                       completed);
    }
    if (!out_dir.empty()) {
      emit_metrics_csv(result.rows, out_dir / ("seed_" + std::to_string(seed) + ".csv"));
    }
    SeedOutcome o;
    o.seed = seed;
    o.final_acc = result.final_eval.accuracy;
    o.final_loss = result.final_eval.loss;
    o.total_bytes_per_agent = result.ledger.total_bytes() / std::max<std::size_t>(s.agents, 1);
    s.outcomes.push_back(o);
    completed.push_back(seed);
  }

  std::vector<double> accs, losses;
  std::uint64_t bytes = 0;
  for (const auto& o : s.outcomes) {
    accs.push_back(o.final_acc);
    losses.push_back(o.final_loss);
    bytes += o.total_bytes_per_agent;
  }
  std::tie(s.final_acc_mean, s.final_acc_std) = mean_std(accs);
  std::tie(s.final_loss_mean, s.final_loss_std) = mean_std(losses);
  s.total_bytes_per_agent = bytes / s.outcomes.size();

  if (!out_dir.empty()) write_text(out_dir / "summary.json", summary_json(s));
  return s;
}

std::string summary_json(const SweepSummary& s) {
  nlohmann::ordered_json j;
  j["algorithm"] = s.algorithm;
  j["topology"] = s.topology;
  j["agents"] = s.agents;
  j["seeds"] = s.seeds;
  j["final_acc_mean"] = s.final_acc_mean;
  j["final_acc_std"] = s.final_acc_std;
  j["final_loss_mean"] = s.final_loss_mean;
  j["final_loss_std"] = s.final_loss_std;
  j["total_bytes_per_agent"] = s.total_bytes_per_agent;
  nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
  for (const auto& o : s.outcomes) {
    per_seed.push_back({{"seed", o.seed}, {"final_acc", o.final_acc},
                        {"final_loss", o.final_loss},
                        {"total_bytes_per_agent", o.total_bytes_per_agent}});
  }
  j["per_seed"] = per_seed;
  return j.dump(2) + "\n";
}

std::vector<GapRow> accuracy_gaps(const SweepSummary& a, const SweepSummary& b) {
  std::vector<GapRow> out;
  for (const auto& oa : a.outcomes) {
    for (const auto& ob : b.outcomes) {
      if (oa.seed != ob.seed) continue;
      out.push_back({oa.seed, 100.0 * oa.final_acc, 100.0 * ob.final_acc,
                     100.0 * (oa.final_acc - ob.final_acc)});
    }
  }
  return out;
}

std::string format_gap_table(const SweepSummary& a, const SweepSummary& b) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %8s\n", "seed", a.algorithm.c_str(),
                b.algorithm.c_str(), "gap");
  os << buf;
  for (const auto& r : accuracy_gaps(a, b)) {
    std::snprintf(buf, sizeof buf, "%-8llu %10.2f %10.2f %+8.2f\n",
                  static_cast<unsigned long long>(r.seed), r.acc_a, r.acc_b, r.gap);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%-8s %10.2f %10.2f %+8.2f\n", "mean", 100.0 * a.final_acc_mean,
                100.0 * b.final_acc_mean, 100.0 * (a.final_acc_mean - b.final_acc_mean));
  os << buf;
  return os.str();
}

}  // namespace ngc
