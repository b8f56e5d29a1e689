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

#include "ngcsim/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "ngcsim/error.hpp"
#include "ngcsim/rng.hpp"

namespace ngc {

void Dataset::validate() const {
  if (labels.empty()) throw ShapeError("dataset has no samples");
  if (num_features == 0) throw ShapeError("dataset has no features");
  if (features.size() != labels.size() * num_features) {
    throw ShapeError("feature matrix size does not match sample count");
  }
  for (std::size_t label : labels) {
    if (label >= num_classes) {
      throw ShapeError("label " + std::to_string(label) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
  }
}

std::vector<double> class_center(std::size_t cls, std::size_t num_classes,
                                 std::size_t dim) {
  std::vector<double> center(dim, 0.0);
  if (num_classes <= 2 * dim) {
    center[cls / 2] = (cls % 2 == 0) ? 1.0 : -1.0;
  } else {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(cls) /
                   static_cast<double>(num_classes);
    center[0] = std::cos(angle);
    if (dim > 1) center[1] = std::sin(angle);
  }
  return center;
}

Dataset generate_synthetic(std::size_t num_classes, std::size_t dim,
                           std::size_t per_class, double spread,
                           std::uint64_t seed) {
  if (num_classes < 2) throw ConfigError("synthetic data needs at least 2 classes");
  if (dim < 1) throw ConfigError("synthetic data needs dim >= 1");
  if (per_class < 1) throw ConfigError("synthetic data needs per_class >= 1");
  if (!(spread > 0.0) || !std::isfinite(spread)) {
    throw ConfigError("synthetic spread must be positive and finite");
  }

  Rng rng(derive_seed(seed, StreamPurpose::dataset));
  Dataset data;
  data.num_features = dim;
  data.num_classes = num_classes;
  data.features.reserve(num_classes * per_class * dim);
  data.labels.reserve(num_classes * per_class);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto center = class_center(c, num_classes, dim);
    for (std::size_t s = 0; s < per_class; ++s) {
      for (std::size_t f = 0; f < dim; ++f) {
        data.features.push_back(center[f] + spread * rng.normal());
      }
      data.labels.push_back(c);
    }
  }
  return data;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("non-numeric field '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite field '" + std::string(field) + "'", line);
  }
  return value;
}

std::size_t parse_label(std::string_view field, std::size_t line) {
  field = trim(field);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("label '" + std::string(field) + "' is not a non-negative integer",
                     line);
  }
  return value;
}

}  // namespace

Dataset parse_csv(std::string_view text) {
  Dataset data;
  std::size_t line_no = 0;
  std::size_t max_label = 0;
  bool have_width = false;

  while (!text.empty()) {
    auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = (eol == std::string_view::npos) ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      std::string_view field = line.substr(start, comma - start);
      if (fields == 0) {
        std::size_t label = parse_label(field, line_no);
        max_label = std::max(max_label, label);
        data.labels.push_back(label);
      } else {
        data.features.push_back(parse_double(field, line_no));
      }
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    if (fields < 2) throw ParseError("row has no features", line_no);
    if (!have_width) {
      data.num_features = fields - 1;
      have_width = true;
    } else if (fields - 1 != data.num_features) {
      throw ParseError("ragged row: expected " + std::to_string(data.num_features) +
                           " features, found " + std::to_string(fields - 1),
                       line_no);
    }
  }

  if (data.labels.empty()) throw ParseError("empty file", line_no == 0 ? 1 : line_no);
  data.num_classes = max_label + 1;
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.labels[i];
    for (double v : data.row(i)) out << ',' << v;
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.num_features = data.num_features;
  out.num_classes = data.num_classes;
  out.features.reserve(indices.size() * data.num_features);
  out.labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    auto r = data.row(idx);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(data.labels[idx]);
  }
  return out;
}

}  // namespace ngc
