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
#include <span>
#include <vector>

namespace ngc {

// Row-major feature matrix with one class label per row.
struct Dataset {
  std::size_t num_features = 0;
  std::size_t num_classes = 0;
  std::vector<double> features;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * num_features, num_features};
  }

  // Throws ShapeError when the invariants do not hold.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

// Gaussian mixture with `per_class` samples of each class. Class centers are
// fixed unit vectors: signed coordinate axes while num_classes <= 2*dim,
// otherwise evenly spaced points on the unit circle of the first two axes.
Dataset generate_synthetic(std::size_t num_classes, std::size_t dim,
                           std::size_t per_class, double spread,
                           std::uint64_t seed);

std::vector<double> class_center(std::size_t cls, std::size_t num_classes,
                                 std::size_t dim);

// Rows of the form `label,f1,...,fk`. The class count is 1 + max label.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text);
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Subset of rows in the given order.
Dataset select_rows(const Dataset& data, std::span<const std::size_t> indices);

}  // namespace ngc
