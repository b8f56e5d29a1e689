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

#include <span>
#include <string>
#include <vector>

namespace ngc {

enum class TopologyKind { ring, chain, torus, full };

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;
  std::size_t num_agents = 5;
  // Torus grid; 0 means the most-square factorization of num_agents.
  std::size_t rows = 0;
  std::size_t cols = 0;

  void validate() const;
  bool operator==(const TopologySpec&) const = default;
};

// Most-square rows x cols = n with rows <= cols and rows >= 2; {0, 0} if none.
std::pair<std::size_t, std::size_t> torus_dims(std::size_t n);

// Dense row-major N x N mixing weights.
class MixingMatrix {
 public:
  MixingMatrix() = default;
  explicit MixingMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {}
  MixingMatrix(std::size_t n, std::vector<double> weights);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {w_.data() + i * n_, n_}; }
  const std::vector<double>& data() const { return w_; }

  static MixingMatrix identity(std::size_t n);

  bool operator==(const MixingMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

// Ring and torus: uniform 1/(deg+1) over self and distinct grid neighbours.
// Chain: Metropolis-Hastings weights. Full: 1/N everywhere.
MixingMatrix build_mixing_matrix(const TopologySpec& spec);

struct DoublyStochasticReport {
  double max_row_deviation = 0.0;
  double max_col_deviation = 0.0;
  double asymmetry = 0.0;  // Frobenius norm of W - W^T
  double min_entry = 0.0;
  double min_diagonal = 0.0;
  bool pass = false;
};

inline constexpr double kStochasticTolerance = 1e-12;

DoublyStochasticReport validate_doubly_stochastic(const MixingMatrix& w);

struct SpectralGap {
  double sqrt_rho = 0.0;  // max(|lambda_2|, |lambda_N|)
  double rho = 0.0;
  // sqrt_rho < 1: the graph is connected and gossip contracts.
  bool contracting = false;
};

// Dense Jacobi eigensolve of W - (1/N) 11^T for N <= 64, deflated power
// iteration otherwise. Throws NumericalError when either fails to converge.
SpectralGap spectral_gap(const MixingMatrix& w);

// Exposed separately so that both routes can be tested on the same matrix.
std::vector<double> symmetric_eigenvalues(const MixingMatrix& w);
double deflated_power_iteration(const MixingMatrix& w, std::size_t max_iters = 10000,
                                double tol = 1e-12);

// Agents j with w_ij > 0, ascending; always includes i.
std::vector<std::size_t> neighbors(const MixingMatrix& w, std::size_t i);

std::string to_string(TopologyKind kind);
TopologyKind parse_topology_kind(const std::string& name);

}  // namespace ngc
