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

#include "ngcsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ngcsim/error.hpp"

namespace ngc {

std::pair<std::size_t, std::size_t> torus_dims(std::size_t n) {
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (std::size_t r = 2; r * r <= n; ++r) {
    if (n % r == 0) best = {r, n / r};
  }
  return best;
}

void TopologySpec::validate() const {
  if (num_agents < 1) throw ConfigError("topology needs at least one agent");
  if (kind != TopologyKind::torus) return;
  std::size_t r = rows, c = cols;
  if (r == 0 && c == 0) {
    std::tie(r, c) = torus_dims(num_agents);
    if (r == 0) {
      throw ConfigError("torus: " + std::to_string(num_agents) +
                        " agents admit no rows x cols grid with both >= 2");
    }
  }
  if (r < 2 || c < 2) throw ConfigError("torus rows and cols must both be >= 2");
  if (r * c != num_agents) {
    throw ConfigError("torus rows*cols = " + std::to_string(r * c) + " != " +
                      std::to_string(num_agents) + " agents");
  }
}

MixingMatrix::MixingMatrix(std::size_t n, std::vector<double> weights)
    : n_(n), w_(std::move(weights)) {
  if (w_.size() != n * n) throw ShapeError("mixing matrix must be N x N");
}

MixingMatrix MixingMatrix::identity(std::size_t n) {
  MixingMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

std::vector<std::set<std::size_t>> adjacency(const TopologySpec& spec) {
  const std::size_t n = spec.num_agents;
  std::vector<std::set<std::size_t>> adj(n);
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    adj[a].insert(b);
    adj[b].insert(a);
  };
  switch (spec.kind) {
    case TopologyKind::ring:
      for (std::size_t i = 0; i < n; ++i) link(i, (i + 1) % n);
      break;
    case TopologyKind::chain:
      for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
    case TopologyKind::full:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) link(i, j);
      break;
    case TopologyKind::torus: {
      auto [rows, cols] = (spec.rows == 0 && spec.cols == 0)
                              ? torus_dims(n)
                              : std::pair{spec.rows, spec.cols};
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          std::size_t id = r * cols + c;
          link(id, r * cols + (c + 1) % cols);
          link(id, ((r + 1) % rows) * cols + c);
        }
      }
      break;
    }
  }
  return adj;
}

}  // namespace

MixingMatrix build_mixing_matrix(const TopologySpec& spec) {
  spec.validate();
  const std::size_t n = spec.num_agents;
  const auto adj = adjacency(spec);
  MixingMatrix w(n);

  if (spec.kind == TopologyKind::full) {
    const double v = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, j) = v;
    return w;
  }

  if (spec.kind == TopologyKind::chain) {
    for (std::size_t i = 0; i < n; ++i) {
      double off = 0.0;
      for (std::size_t j : adj[i]) {
        const double wij =
            1.0 / (1.0 + static_cast<double>(std::max(adj[i].size(), adj[j].size())));
        w(i, j) = wij;
        off += wij;
      }
      w(i, i) = 1.0 - off;
    }
    return w;
  }

  // Ring and torus graphs are regular, so uniform weights are symmetric.
  for (std::size_t i = 0; i < n; ++i) {
    const double v = 1.0 / static_cast<double>(adj[i].size() + 1);
    w(i, i) = v;
    for (std::size_t j : adj[i]) w(i, j) = v;
  }
  return w;
}

DoublyStochasticReport validate_doubly_stochastic(const MixingMatrix& w) {
  const std::size_t n = w.size();
  DoublyStochasticReport r;
  r.min_entry = n ? w(0, 0) : 0.0;
  r.min_diagonal = n ? w(0, 0) : 0.0;
  double asym_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += w(i, j);
      col += w(j, i);
      r.min_entry = std::min(r.min_entry, w(i, j));
      const double d = w(i, j) - w(j, i);
      asym_sq += d * d;
    }
    r.min_diagonal = std::min(r.min_diagonal, w(i, i));
    r.max_row_deviation = std::max(r.max_row_deviation, std::abs(row - 1.0));
    r.max_col_deviation = std::max(r.max_col_deviation, std::abs(col - 1.0));
  }
  r.asymmetry = std::sqrt(asym_sq);
  r.pass = n > 0 && r.max_row_deviation <= kStochasticTolerance &&
           r.max_col_deviation <= kStochasticTolerance && r.asymmetry == 0.0 &&
           r.min_entry >= 0.0;
  return r;
}

namespace {

// W - (1/N) 11^T, which removes the consensus eigenvector.
std::vector<double> deflate(const MixingMatrix& w) {
  const std::size_t n = w.size();
  const double q = 1.0 / static_cast<double>(n);
  std::vector<double> b(w.data());
  for (double& v : b) v -= q;
  return b;
}

// Cyclic Jacobi rotations on a dense symmetric matrix.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  double total = 0.0;
  for (double v : a) total += v * v;
  const double target = 1e-30 * std::max(total, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (off <= target) {
      std::vector<double> eig(n);
      for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
      std::sort(eig.begin(), eig.end(), std::greater<>());
      return eig;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  throw NumericalError("Jacobi eigensolve did not converge in 100 sweeps");
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const MixingMatrix& w) {
  return jacobi_eigenvalues(w.data(), w.size());
}

double deflated_power_iteration(const MixingMatrix& w, std::size_t max_iters, double tol) {
  const std::size_t n = w.size();
  if (n <= 1) return 0.0;
  const auto b = deflate(w);
  auto apply = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += b[i * n + j] * x[j];
    return y;
  };
  auto norm = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };

  // Deterministic start vector, orthogonal to the all-ones direction.
  std::vector<double> x(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(1.0 + 0.7 * static_cast<double>(i)) + 0.01 * static_cast<double>(i);
    mean += x[i];
  }
  mean /= static_cast<double>(n);
  for (double& v : x) v -= mean;

  // Iterate on B^2 so that +lambda and -lambda do not oscillate.
  double prev = -1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const double nx = norm(x);
    if (nx == 0.0) return 0.0;
    for (double& v : x) v /= nx;
    auto y = apply(apply(x));
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += x[i] * y[i];
    if (mu <= 0.0 && norm(y) == 0.0) return 0.0;
    if (std::abs(mu - prev) <= tol * std::max(mu, 1e-300)) return std::sqrt(std::max(mu, 0.0));
    prev = mu;
    x = std::move(y);
  }
  throw NumericalError("power iteration did not converge in " + std::to_string(max_iters) +
                       " iterations");
}

SpectralGap spectral_gap(const MixingMatrix& w) {
  const std::size_t n = w.size();
  SpectralGap g;
  if (n <= 1) {
    g.contracting = true;
    return g;
  }
  if (n <= 64) {
    const auto eig = jacobi_eigenvalues(deflate(w), n);
    g.sqrt_rho = std::max(std::abs(eig.front()), std::abs(eig.back()));
  } else {
    g.sqrt_rho = deflated_power_iteration(w);
  }
  g.rho = g.sqrt_rho * g.sqrt_rho;
  g.contracting = g.sqrt_rho < 1.0 - 1e-12;
  return g;
}

std::vector<std::size_t> neighbors(const MixingMatrix& w, std::size_t i) {
  if (i >= w.size()) {
    throw ConfigError("agent index " + std::to_string(i) + " out of range for " +
                      std::to_string(w.size()) + " agents");
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w(i, j) > 0.0 || j == i) out.push_back(j);
  }
  return out;
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::chain: return "chain";
    case TopologyKind::torus: return "torus";
    case TopologyKind::full: return "full";
  }
  return "?";
}

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "ring") return TopologyKind::ring;
  if (name == "chain") return TopologyKind::chain;
  if (name == "torus") return TopologyKind::torus;
  if (name == "full") return TopologyKind::full;
  throw ConfigError("unknown topology '" + name + "'");
}

}  // namespace ngc
