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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ngcsim/error.hpp"
#include "ngcsim/report.hpp"

using namespace ngc;

namespace {

RunConfig tiny(Algorithm algo) {
  RunConfig c;
  c.algorithm = algo;
  c.dataset.per_class = 20;
  c.dataset.test_per_class = 10;
  c.dataset.dim = 6;
  c.hidden = 8;
  c.epochs = 2;
  c.batch_size = 8;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("csv layout") {
  MetricsRow r;
  r.round = 12;
  r.epoch = 1;
  r.train_loss = 1.0 / 3.0;
  r.val_loss = 2.5;
  r.val_acc = 0.75;
  r.consensus_error = 1e-12;
  r.eps_l1 = std::nan("");
  r.omega_l1 = 0.0;
  r.param_bytes = 419520;
  r.crossgrad_bytes = 7;
  auto text = format_metrics_csv({r});
  CHECK(text ==
        "# ngcsim metrics v1\n"
        "round,epoch,train_loss,val_loss,val_acc,consensus_error,eps_l1,omega_l1,param_bytes,"
        "crossgrad_bytes\n"
        "12,1,0.333333333,2.5,0.75,1e-12,nan,0,419520,7\n");
}

TEST_CASE("empty run writes a header-only file") {
  auto text = format_metrics_csv({});
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(parse_metrics_csv(text).empty());
}

TEST_CASE("read back reproduces values to nine digits") {
  auto result = run(tiny(Algorithm::ngc));
  auto path = scratch("ngcsim_metrics_rt.csv");
  emit_metrics_csv(result.rows, path);
  auto back = read_metrics_csv(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == result.rows.size());
  auto close9 = [](double a, double b) {
    if (std::isnan(a)) return std::isnan(b);
    return std::abs(a - b) <= 5e-9 * std::max(std::abs(a), 1e-300);
  };
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& a = result.rows[i];
    const auto& b = back[i];
    CHECK(a.round == b.round);
    CHECK(a.epoch == b.epoch);
    CHECK(close9(a.train_loss, b.train_loss));
    CHECK(close9(a.val_loss, b.val_loss));
    CHECK(close9(a.val_acc, b.val_acc));
    CHECK(close9(a.consensus_error, b.consensus_error));
    CHECK(close9(a.eps_l1, b.eps_l1));
    CHECK(close9(a.omega_l1, b.omega_l1));
    CHECK(a.param_bytes == b.param_bytes);
    CHECK(a.crossgrad_bytes == b.crossgrad_bytes);
  }
}

TEST_CASE("csv errors") {
  CHECK_THROWS_AS(emit_metrics_csv({}, "/nonexistent/dir/m.csv"), Error);
  CHECK_THROWS_AS(parse_metrics_csv("# ngcsim metrics v1\nround,epoch\n"), ParseError);
  std::string bad = std::string(kMetricsHeader) + "\n1,2,3\n";
  CHECK_THROWS_AS(parse_metrics_csv(bad), ParseError);
}

TEST_CASE("one seed has zero spread") {
  auto s = run_sweep(tiny(Algorithm::ngc), {7});
  CHECK(s.final_acc_std == 0.0);
  CHECK(s.outcomes.size() == 1);
  CHECK(s.final_acc_mean == s.outcomes[0].final_acc);
}

TEST_CASE("sweep output directory and bitwise reproducible summary") {
  auto dir = scratch("ngcsim_sweep_a");
  auto s = run_sweep(tiny(Algorithm::dpsgd), {1, 2, 3}, dir);
  CHECK(std::filesystem::exists(dir / "config.txt"));
  CHECK(std::filesystem::exists(dir / "seed_2.csv"));
  auto first = slurp(dir / "summary.json");
  auto dir2 = scratch("ngcsim_sweep_b");
  run_sweep(tiny(Algorithm::dpsgd), {1, 2, 3}, dir2);
  CHECK(first == slurp(dir2 / "summary.json"));
  CHECK(slurp(dir / "seed_3.csv") == slurp(dir2 / "seed_3.csv"));

  auto j = nlohmann::json::parse(first);
  CHECK(j["algorithm"] == "dpsgd");
  CHECK(j["topology"] == "ring");
  CHECK(j["agents"] == 5);
  CHECK(j["seeds"] == nlohmann::json::array({1, 2, 3}));
  for (const char* k : {"final_acc_mean", "final_acc_std", "total_bytes_per_agent"}) {
    CHECK(j.contains(k));
  }
  // Population standard deviation.
  double m = 0.0, v = 0.0;
  for (const auto& o : s.outcomes) m += o.final_acc / 3.0;
  for (const auto& o : s.outcomes) v += (o.final_acc - m) * (o.final_acc - m) / 3.0;
  CHECK(s.final_acc_std == doctest::Approx(std::sqrt(v)));

  // The echoed config reproduces the run on its own.
  auto cfg = resolve_config(parse_config_text(slurp(dir / "config.txt")), {});
  cfg.run.seed = 2;
  CHECK(format_metrics_csv(run(cfg.run).rows) == slurp(dir / "seed_2.csv"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("a failing seed produces a partial-failure report") {
  RunConfig cfg = tiny(Algorithm::dpsgd);
  cfg.hp.eta = 1e200;
  cfg.activation = Activation::relu;
  try {
    run_sweep(cfg, {1, 2});
    FAIL("expected SweepError");
  } catch (const SweepError& e) {
    CHECK(e.completed().empty());
    CHECK(std::string(e.what()).find("seed 1") != std::string::npos);
  }
  CHECK_THROWS_AS(run_sweep(tiny(Algorithm::ngc), {}), ConfigError);
}

TEST_CASE("gap table pairs seeds") {
  auto a = run_sweep(tiny(Algorithm::ngc), {1, 2});
  auto b = run_sweep(tiny(Algorithm::dpsgd), {1, 2});
  auto gaps = accuracy_gaps(a, b);
  REQUIRE(gaps.size() == 2);
  CHECK(gaps[0].gap == doctest::Approx(100.0 * (a.outcomes[0].final_acc - b.outcomes[0].final_acc)));
  auto table = format_gap_table(a, b);
  CHECK(table.find("mean") != std::string::npos);
  CHECK(table.find("ngc") != std::string::npos);
}
