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

#include "ngcsim/compression.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "ngcsim/error.hpp"

namespace ngc {

CompressedTensor compress(std::span<const double> p) {
  CompressedTensor ct;
  ct.dim = p.size();
  ct.signs.assign((p.size() + 7) / 8, 0);
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    l1 += std::abs(p[i]);
    if (p[i] >= 0.0) ct.signs[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  ct.scale = p.empty() ? 0.0 : l1 / static_cast<double>(p.size());
  return ct;
}

void decompress_into(const CompressedTensor& ct, std::span<double> out) {
  if (out.size() != ct.dim) throw ShapeError("decompress: output dimension mismatch");
  for (std::size_t i = 0; i < ct.dim; ++i) out[i] = ct.positive(i) ? ct.scale : -ct.scale;
}

std::vector<double> decompress(const CompressedTensor& ct) {
  std::vector<double> out(ct.dim);
  decompress_into(ct, out);
  return out;
}

CompressedTensor ef_compress(std::span<const double> g, ErrorBuffer& e) {
  if (e.values.size() != g.size()) {
    throw ShapeError("error buffer has dimension " + std::to_string(e.values.size()) +
                     ", gradient has " + std::to_string(g.size()));
  }
  auto& p = e.values;
  for (std::size_t i = 0; i < g.size(); ++i) p[i] += g[i];
  CompressedTensor delta = compress(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] -= delta.positive(i) ? delta.scale : -delta.scale;
  }
  return delta;
}

EfResult ef_step(std::span<const double> g, const ErrorBuffer& e) {
  EfResult r{{}, e};
  r.delta = ef_compress(g, r.next_error);
  return r;
}

std::size_t wire_size_bytes(std::size_t dim) { return kWireHeaderBytes + (dim + 7) / 8; }

std::vector<std::uint8_t> encode_wire(const CompressedTensor& ct) {
  std::vector<std::uint8_t> out(wire_size_bytes(ct.dim));
  auto dim = static_cast<std::uint64_t>(ct.dim);
  for (int b = 0; b < 8; ++b) out[b] = static_cast<std::uint8_t>(dim >> (8 * b));
  auto scale_bits = std::bit_cast<std::uint32_t>(static_cast<float>(ct.scale));
  for (int b = 0; b < 4; ++b) out[8 + b] = static_cast<std::uint8_t>(scale_bits >> (8 * b));
  std::memcpy(out.data() + kWireHeaderBytes, ct.signs.data(), ct.signs.size());
  return out;
}

CompressedTensor decode_wire(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kWireHeaderBytes) throw ShapeError("wire image shorter than header");
  std::uint64_t dim = 0;
  for (int b = 0; b < 8; ++b) dim |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  std::uint32_t scale_bits = 0;
  for (int b = 0; b < 4; ++b) scale_bits |= static_cast<std::uint32_t>(bytes[8 + b]) << (8 * b);
  CompressedTensor ct;
  ct.dim = static_cast<std::size_t>(dim);
  if (bytes.size() != wire_size_bytes(ct.dim)) {
    throw ShapeError("wire image size does not match encoded dimension");
  }
  ct.scale = static_cast<double>(std::bit_cast<float>(scale_bits));
  ct.signs.assign(bytes.begin() + kWireHeaderBytes, bytes.end());
  return ct;
}

}  // namespace ngc
