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
#include <vector>

#include "ngcsim/dataset.hpp"
#include "ngcsim/rng.hpp"

namespace ngc {

using FlatParams = std::vector<double>;
using FlatGradient = std::vector<double>;

enum class Architecture { logistic, mlp };
enum class Activation { tanh, relu };

// Parameters are flattened in a fixed order:
//   logistic: W (classes x input, row-major), b (classes)
//   mlp:      W1 (hidden x input, row-major), b1 (hidden),
//             W2 (classes x hidden, row-major), b2 (classes)
struct ModelSpec {
  Architecture architecture = Architecture::mlp;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_classes = 0;
  Activation activation = Activation::tanh;

  std::size_t param_count() const;
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

// Unflattened view of the parameter vector. Logistic models only use w2/b2.
struct LayerParams {
  std::vector<double> w1, b1, w2, b2;
  bool operator==(const LayerParams&) const = default;
};

LayerParams unflatten(const ModelSpec& spec, std::span<const double> params);
FlatParams flatten(const ModelSpec& spec, const LayerParams& layers);

using Batch = std::vector<std::size_t>;

// Throws ShapeError for out-of-range or duplicate indices.
void validate_batch(const Dataset& data, std::span<const std::size_t> batch);

struct LossAndGradient {
  double loss = 0.0;
  FlatGradient grad;
};

// Mean cross-entropy over the batch and its exact gradient.
LossAndGradient loss_and_gradient(const ModelSpec& spec, std::span<const double> params,
                                  const Dataset& data, std::span<const std::size_t> batch);

double batch_loss(const ModelSpec& spec, std::span<const double> params,
                  const Dataset& data, std::span<const std::size_t> batch);

// Gradient of the local loss evaluated at another agent's parameters.
FlatGradient cross_gradient(const ModelSpec& spec, std::span<const double> foreign_params,
                            const Dataset& local_data, std::span<const std::size_t> batch);

// Central differences, one coordinate at a time. Test oracle.
FlatGradient finite_difference_gradient(const ModelSpec& spec,
                                        std::span<const double> params,
                                        const Dataset& data,
                                        std::span<const std::size_t> batch, double h);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Full-dataset loss and top-1 accuracy; argmax ties go to the lowest class.
Evaluation evaluate(const ModelSpec& spec, std::span<const double> params,
                    const Dataset& data);

std::size_t predict(const ModelSpec& spec, std::span<const double> params,
                    std::span<const double> features);

// Logistic: zeros. MLP: Glorot-uniform weights and zero biases.
FlatParams init_params(const ModelSpec& spec, Rng& rng);

}  // namespace ngc
