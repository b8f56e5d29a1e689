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

#include "ngcsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ngcsim/error.hpp"

namespace ngc {

FlatParams consensus_model(std::span<const FlatParams> params) {
  if (params.empty()) throw ConfigError("consensus model of zero agents");
  const FlatParams& base = params.front();
  std::vector<double> dev(base.size(), 0.0);
  for (const auto& x : params) {
    if (x.size() != base.size()) throw ShapeError("agents disagree on parameter dimension");
    for (std::size_t k = 0; k < base.size(); ++k) dev[k] += x[k] - base[k];
  }
  const double inv = 1.0 / static_cast<double>(params.size());
  FlatParams out(base);
  for (std::size_t k = 0; k < base.size(); ++k) out[k] += dev[k] * inv;
  return out;
}

FlatParams consensus_model(std::span<const AgentState> agents) {
  std::vector<FlatParams> params;
  params.reserve(agents.size());
  for (const auto& a : agents) params.push_back(a.params);
  return consensus_model(params);
}

double consensus_error(std::span<const FlatParams> params) {
  const FlatParams mean = consensus_model(params);
  double total = 0.0;
  for (const auto& x : params) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = mean[k] - x[k];
      total += d * d;
    }
  }
  return total / static_cast<double>(params.size());
}

double consensus_error(std::span<const AgentState> agents) {
  std::vector<FlatParams> params;
  params.reserve(agents.size());
  for (const auto& a : agents) params.push_back(a.params);
  return consensus_error(params);
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

BiasNorms bias_norms(std::span<const GradientBundle> bundles) {
  if (bundles.empty()) return {};
  BiasNorms out;
  for (const auto& b : bundles) {
    const auto terms = bias_terms(b);
    out.eps_l1 += l1_norm(terms.epsilon);
    out.omega_l1 += l1_norm(terms.omega);
  }
  const auto n = static_cast<double>(bundles.size());
  out.eps_l1 /= n;
  out.omega_l1 /= n;
  return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

DeviationReport deviation_diagnostic(const ModelSpec& spec, const Dataset& train,
                               const Shards& shards, const MixingMatrix& w,
                               std::span<const double> params, std::size_t batch_size,
                               std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < kDeviationMinSamples) {
    throw ConfigError("deviation diagnostic needs at least " +
                      std::to_string(kDeviationMinSamples) + " samples");
  }
  const std::size_t n = shards.size();
  if (n == 0 || w.size() != n) throw ConfigError("shards and mixing matrix disagree");
  const std::size_t d = params.size();

  // Full-shard gradients and their average.
  std::vector<FlatGradient> full(n);
  FlatGradient global(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    full[i] = loss_and_gradient(spec, params, train, shards[i]).grad;
    for (std::size_t k = 0; k < d; ++k) global[k] += full[i][k] / static_cast<double>(n);
  }

  DeviationReport r;
  r.samples = sample_count;
  for (std::size_t i = 0; i < n; ++i) r.zeta_sq = std::max(r.zeta_sq, sq_dist(full[i], global));

  std::vector<AgentState> agents(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].shard = shards[i];
    agents[i].rng = Rng(derive_seed(seed, StreamPurpose::diagnostics, i));
  }

  std::vector<double> var_sum(n, 0.0);
  std::vector<FlatGradient> g(n);
  FlatGradient avg_dev(d);
  for (std::size_t s = 0; s < sample_count; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const Batch batch = draw_batch(agents[i], batch_size);
      g[i] = loss_and_gradient(spec, params, train, batch).grad;
      var_sum[i] += sq_dist(g[i], full[i]);
    }
    std::fill(avg_dev.begin(), avg_dev.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      // alpha = 1: gtilde_i = sum_j w_ij g_j.
      FlatGradient mixed(d, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double wij = w(i, j);
        if (wij == 0.0) continue;
        for (std::size_t k = 0; k < d; ++k) mixed[k] += wij * g[j][k];
      }
      r.per_agent_lhs += sq_dist(mixed, g[i]) / static_cast<double>(n);
      for (std::size_t k = 0; k < d; ++k) {
        avg_dev[k] += (mixed[k] - g[i][k]) / static_cast<double>(n);
      }
    }
    double sq = 0.0;
    for (double v : avg_dev) sq += v * v;
    r.lhs += sq;
  }
  const auto m = static_cast<double>(sample_count);
  r.lhs /= m;
  r.per_agent_lhs /= m;
  for (std::size_t i = 0; i < n; ++i) r.sigma_sq = std::max(r.sigma_sq, var_sum[i] / m);
  r.bound = 4.0 * (r.sigma_sq / static_cast<double>(n) + r.zeta_sq);
  r.pass = r.lhs <= kDeviationSlack * r.bound;
  return r;
}

DeviationReport deviation_diagnostic(const ModelSpec& spec, const Dataset& train,
                               std::span<const AgentState> agents, const MixingMatrix& w,
                               std::size_t batch_size, std::size_t sample_count,
                               std::uint64_t seed) {
  Shards shards;
  shards.reserve(agents.size());
  for (const auto& a : agents) shards.push_back(a.shard);
  const FlatParams x = consensus_model(agents);
  return deviation_diagnostic(spec, train, shards, w, x, batch_size, sample_count, seed);
}

}  // namespace ngc
