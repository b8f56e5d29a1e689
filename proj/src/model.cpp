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

#include "ngcsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ngcsim/error.hpp"

namespace ngc {

std::size_t ModelSpec::param_count() const {
  if (architecture == Architecture::logistic) {
    return num_classes * input_dim + num_classes;
  }
  return hidden_dim * input_dim + hidden_dim + num_classes * hidden_dim + num_classes;
}

void ModelSpec::validate() const {
  if (input_dim == 0) throw ConfigError("model input_dim must be >= 1");
  if (num_classes < 2) throw ConfigError("model needs at least 2 classes");
  if (architecture == Architecture::mlp && hidden_dim == 0) {
    throw ConfigError("mlp hidden_dim must be >= 1");
  }
}

namespace {

void check_params(const ModelSpec& spec, std::span<const double> params) {
  if (params.size() != spec.param_count()) {
    throw ShapeError("parameter vector has length " + std::to_string(params.size()) +
                     ", model expects " + std::to_string(spec.param_count()));
  }
}

void check_data(const ModelSpec& spec, const Dataset& data) {
  if (data.num_features != spec.input_dim) {
    throw ShapeError("dataset has " + std::to_string(data.num_features) +
                     " features, model expects " + std::to_string(spec.input_dim));
  }
  if (data.num_classes > spec.num_classes) {
    throw ShapeError("dataset has more classes than the model outputs");
  }
}

// Offsets into the flat vector, in flattening order.
struct Layout {
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, end = 0;
};

Layout layout(const ModelSpec& spec) {
  Layout l;
  if (spec.architecture == Architecture::logistic) {
    l.w2 = 0;
    l.b2 = spec.num_classes * spec.input_dim;
    l.end = l.b2 + spec.num_classes;
    return l;
  }
  l.w1 = 0;
  l.b1 = spec.hidden_dim * spec.input_dim;
  l.w2 = l.b1 + spec.hidden_dim;
  l.b2 = l.w2 + spec.num_classes * spec.hidden_dim;
  l.end = l.b2 + spec.num_classes;
  return l;
}

double activate(Activation a, double z) {
  return a == Activation::tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// Derivative expressed through the activation output.
double activate_grad(Activation a, double z, double out) {
  if (a == Activation::tanh) return 1.0 - out * out;
  return z > 0.0 ? 1.0 : 0.0;
}

// Scratch space for one forward/backward pass.
struct Workspace {
  std::vector<double> pre, hidden, logits;
};

// Fills ws.logits (and the hidden layer for mlp) for one input row.
void forward(const ModelSpec& spec, const Layout& l, std::span<const double> p,
             std::span<const double> x, Workspace& ws) {
  const std::size_t in = spec.input_dim;
  const std::size_t C = spec.num_classes;
  std::span<const double> layer_in = x;
  std::size_t width = in;
  if (spec.architecture == Architecture::mlp) {
    const std::size_t H = spec.hidden_dim;
    ws.pre.assign(H, 0.0);
    ws.hidden.assign(H, 0.0);
    for (std::size_t h = 0; h < H; ++h) {
      double z = p[l.b1 + h];
      const double* w = p.data() + l.w1 + h * in;
      for (std::size_t f = 0; f < in; ++f) z += w[f] * x[f];
      ws.pre[h] = z;
      ws.hidden[h] = activate(spec.activation, z);
    }
    layer_in = ws.hidden;
    width = H;
  }
  ws.logits.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    double z = p[l.b2 + c];
    const double* w = p.data() + l.w2 + c * width;
    for (std::size_t f = 0; f < width; ++f) z += w[f] * layer_in[f];
    ws.logits[c] = z;
  }
}

// Cross-entropy of the stabilized log-softmax; leaves softmax probabilities
// in `logits`.
double softmax_xent(std::vector<double>& logits, std::size_t label) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  const double shifted = logits[label] - mx;
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - mx);
    sum += z;
  }
  const double loss = std::log(sum) - shifted;
  for (double& z : logits) z /= sum;
  return loss;
}

}  // namespace

LayerParams unflatten(const ModelSpec& spec, std::span<const double> params) {
  check_params(spec, params);
  Layout l = layout(spec);
  auto slice = [&](std::size_t a, std::size_t b) {
    return std::vector<double>(params.begin() + static_cast<std::ptrdiff_t>(a),
                               params.begin() + static_cast<std::ptrdiff_t>(b));
  };
  LayerParams out;
  if (spec.architecture == Architecture::mlp) {
    out.w1 = slice(l.w1, l.b1);
    out.b1 = slice(l.b1, l.w2);
  }
  out.w2 = slice(l.w2, l.b2);
  out.b2 = slice(l.b2, l.end);
  return out;
}

FlatParams flatten(const ModelSpec& spec, const LayerParams& layers) {
  FlatParams out;
  out.reserve(spec.param_count());
  if (spec.architecture == Architecture::mlp) {
    out.insert(out.end(), layers.w1.begin(), layers.w1.end());
    out.insert(out.end(), layers.b1.begin(), layers.b1.end());
  }
  out.insert(out.end(), layers.w2.begin(), layers.w2.end());
  out.insert(out.end(), layers.b2.begin(), layers.b2.end());
  check_params(spec, out);
  return out;
}

void validate_batch(const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw ShapeError("empty batch");
  std::vector<std::size_t> sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= data.size()) {
    throw ShapeError("batch index " + std::to_string(sorted.back()) + " out of range");
  }
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ShapeError("batch contains duplicate indices");
  }
}

LossAndGradient loss_and_gradient(const ModelSpec& spec, std::span<const double> params,
                                  const Dataset& data, std::span<const std::size_t> batch) {
  check_params(spec, params);
  check_data(spec, data);
  validate_batch(data, batch);

  const Layout l = layout(spec);
  const std::size_t in = spec.input_dim;
  const std::size_t C = spec.num_classes;
  const bool mlp = spec.architecture == Architecture::mlp;
  const std::size_t H = mlp ? spec.hidden_dim : in;

  LossAndGradient out;
  out.grad.assign(params.size(), 0.0);
  double* g = out.grad.data();
  Workspace ws;
  std::vector<double> dhidden(mlp ? H : 0);

  for (std::size_t idx : batch) {
    auto x = data.row(idx);
    forward(spec, l, params, x, ws);
    out.loss += softmax_xent(ws.logits, data.labels[idx]);
    ws.logits[data.labels[idx]] -= 1.0;  // dL/dlogits

    std::span<const double> layer_in = mlp ? std::span<const double>(ws.hidden) : x;
    if (mlp) std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (std::size_t c = 0; c < C; ++c) {
      const double d = ws.logits[c];
      g[l.b2 + c] += d;
      double* gw = g + l.w2 + c * H;
      for (std::size_t f = 0; f < H; ++f) gw[f] += d * layer_in[f];
      if (mlp) {
        const double* w = params.data() + l.w2 + c * H;
        for (std::size_t f = 0; f < H; ++f) dhidden[f] += d * w[f];
      }
    }
    if (!mlp) continue;
    for (std::size_t h = 0; h < H; ++h) {
      const double dz = dhidden[h] * activate_grad(spec.activation, ws.pre[h], ws.hidden[h]);
      g[l.b1 + h] += dz;
      double* gw = g + l.w1 + h * in;
      for (std::size_t f = 0; f < in; ++f) gw[f] += dz * x[f];
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (double& v : out.grad) v *= inv;
  return out;
}

double batch_loss(const ModelSpec& spec, std::span<const double> params,
                  const Dataset& data, std::span<const std::size_t> batch) {
  check_params(spec, params);
  check_data(spec, data);
  validate_batch(data, batch);
  const Layout l = layout(spec);
  Workspace ws;
  double loss = 0.0;
  for (std::size_t idx : batch) {
    forward(spec, l, params, data.row(idx), ws);
    loss += softmax_xent(ws.logits, data.labels[idx]);
  }
  return loss / static_cast<double>(batch.size());
}

FlatGradient cross_gradient(const ModelSpec& spec, std::span<const double> foreign_params,
                            const Dataset& local_data, std::span<const std::size_t> batch) {
  return loss_and_gradient(spec, foreign_params, local_data, batch).grad;
}

FlatGradient finite_difference_gradient(const ModelSpec& spec,
                                        std::span<const double> params,
                                        const Dataset& data,
                                        std::span<const std::size_t> batch, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  check_params(spec, params);
  FlatParams probe(params.begin(), params.end());
  FlatGradient grad(params.size());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double orig = probe[k];
    probe[k] = orig + h;
    const double up = batch_loss(spec, probe, data, batch);
    probe[k] = orig - h;
    const double down = batch_loss(spec, probe, data, batch);
    probe[k] = orig;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::size_t predict(const ModelSpec& spec, std::span<const double> params,
                    std::span<const double> features) {
  Workspace ws;
  forward(spec, layout(spec), params, features, ws);
  // max_element returns the first maximum, i.e. the lowest class index.
  return static_cast<std::size_t>(
      std::max_element(ws.logits.begin(), ws.logits.end()) - ws.logits.begin());
}

Evaluation evaluate(const ModelSpec& spec, std::span<const double> params,
                    const Dataset& data) {
  check_params(spec, params);
  check_data(spec, data);
  if (data.size() == 0) throw ShapeError("cannot evaluate on an empty dataset");
  const Layout l = layout(spec);
  Workspace ws;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    forward(spec, l, params, data.row(i), ws);
    auto best = static_cast<std::size_t>(
        std::max_element(ws.logits.begin(), ws.logits.end()) - ws.logits.begin());
    if (best == data.labels[i]) ++correct;
    loss += softmax_xent(ws.logits, data.labels[i]);
  }
  const auto n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

FlatParams init_params(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  FlatParams p(spec.param_count(), 0.0);
  if (spec.architecture == Architecture::logistic) return p;
  const Layout l = layout(spec);
  const double a1 = std::sqrt(6.0 / static_cast<double>(spec.input_dim + spec.hidden_dim));
  for (std::size_t k = l.w1; k < l.b1; ++k) p[k] = rng.uniform(-a1, a1);
  const double a2 = std::sqrt(6.0 / static_cast<double>(spec.hidden_dim + spec.num_classes));
  for (std::size_t k = l.w2; k < l.b2; ++k) p[k] = rng.uniform(-a2, a2);
  return p;
}

}  // namespace ngc
