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
#include <span>
#include <vector>

namespace ngc {

// Scaled-sign encoding: one bit per coordinate plus a single magnitude.
// Coordinate i lives at byte i/8, bit i%8; a set bit means non-negative.
struct CompressedTensor {
  std::size_t dim = 0;
  double scale = 0.0;  // mean absolute value of the compressed input
  std::vector<std::uint8_t> signs;

  bool positive(std::size_t i) const { return (signs[i / 8] >> (i % 8)) & 1u; }
  bool operator==(const CompressedTensor&) const = default;
};

// One error-feedback residual per gradient stream, zero-initialised.
struct ErrorBuffer {
  std::vector<double> values;

  ErrorBuffer() = default;
  explicit ErrorBuffer(std::size_t dim) : values(dim, 0.0) {}
};

// sign(0) is taken as +1.
CompressedTensor compress(std::span<const double> p);
std::vector<double> decompress(const CompressedTensor& ct);
void decompress_into(const CompressedTensor& ct, std::span<double> out);

struct EfResult {
  CompressedTensor delta;
  ErrorBuffer next_error;
};

// p = g + e; delta = compress(p); e' = p - decompress(delta).
EfResult ef_step(std::span<const double> g, const ErrorBuffer& e);

// Same step, updating the buffer in place.
CompressedTensor ef_compress(std::span<const double> g, ErrorBuffer& e);

// Header is an 8-byte dimension followed by a 4-byte float scale.
inline constexpr std::size_t kWireHeaderBytes = 8 + 4;
std::size_t wire_size_bytes(std::size_t dim);
inline std::size_t wire_size_bytes(const CompressedTensor& ct) {
  return wire_size_bytes(ct.dim);
}
// Uncompressed payload: 32-bit floats.
inline std::size_t raw_wire_bytes(std::size_t dim) { return 4 * dim; }

// Little-endian wire image; the scale is narrowed to float32.
std::vector<std::uint8_t> encode_wire(const CompressedTensor& ct);
CompressedTensor decode_wire(std::span<const std::uint8_t> bytes);

}  // namespace ngc
