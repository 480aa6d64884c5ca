// Copyright 2026 The cyclerl Authors.
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

// Binary weights file:
//
//   8 bytes   magic "CYRLQNET"
//   u32 LE    format version (1)
//   u32 LE    number of layer sizes L
//   L x u64   layer sizes {input, hidden..., output}
//   per layer: weight matrix row-major (out x in), then bias (out),
//              IEEE-754 binary64 little-endian.

#ifndef CYCLERL_WEIGHTS_IO_HPP_
#define CYCLERL_WEIGHTS_IO_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclerl/q_network.hpp"

namespace cyclerl {

inline constexpr std::array<char, 8> kWeightsMagic = {'C', 'Y', 'R', 'L', 'Q', 'N', 'E', 'T'};
inline constexpr std::uint32_t kWeightsVersion = 1;

class WeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad magic bytes or unsupported format version.
class WeightsVersionError : public WeightsError {
 public:
  using WeightsError::WeightsError;
};

/// Architecture in the file differs from what the caller expects.
class WeightsShapeError : public WeightsError {
 public:
  using WeightsError::WeightsError;
};

class WeightsTruncatedError : public WeightsError {
 public:
  using WeightsError::WeightsError;
};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t value) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffU);
  out.write(bytes, 8);
}

inline void put_u32(std::ostream& out, std::uint32_t value) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffU);
  out.write(bytes, 4);
}

inline std::uint64_t get_uint(std::istream& in, int width) {
  unsigned char bytes[8] = {};
  in.read(reinterpret_cast<char*>(bytes), width);
  if (in.gcount() != width) throw WeightsTruncatedError("weights file is truncated");
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return value;
}

inline void put_double(std::ostream& out, double value) {
  put_u64(out, std::bit_cast<std::uint64_t>(value));
}

inline double get_double(std::istream& in) {
  return std::bit_cast<double>(get_uint(in, 8));
}

}  // namespace detail

inline void save_weights(const QNetworkParams& params, std::ostream& out) {
  out.write(kWeightsMagic.data(), kWeightsMagic.size());
  detail::put_u32(out, kWeightsVersion);
  const auto sizes = params.layer_sizes();
  detail::put_u32(out, static_cast<std::uint32_t>(sizes.size()));
  for (auto size : sizes) detail::put_u64(out, size);
  for (const auto& layer : params.layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
        detail::put_double(out, layer.weight(i, j));
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) detail::put_double(out, layer.bias(i));
  }
  if (!out) throw WeightsError("failed writing weights");
}

inline void save_weights(const QNetworkParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WeightsError("cannot open " + path + " for writing");
  save_weights(params, out);
}

/// Reads a weights file; when `expected_sizes` is given the stored
/// architecture must match it exactly.
inline QNetworkParams load_weights(
    std::istream& in, std::optional<std::vector<std::size_t>> expected_sizes = std::nullopt) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size())) {
    throw WeightsTruncatedError("weights file is truncated");
  }
  if (magic != kWeightsMagic) throw WeightsVersionError("not a weights file (bad magic)");
  const auto version = detail::get_uint(in, 4);
  if (version != kWeightsVersion) {
    throw WeightsVersionError("unsupported weights format version " + std::to_string(version));
  }
  const auto count = detail::get_uint(in, 4);
  if (count < 2 || count > 64) throw WeightsShapeError("invalid layer count in weights file");
  std::vector<std::size_t> sizes;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto size = detail::get_uint(in, 8);
    if (size == 0 || size > (1U << 20)) throw WeightsShapeError("invalid layer size");
    sizes.push_back(static_cast<std::size_t>(size));
  }
  if (expected_sizes && *expected_sizes != sizes) {
    std::string found;
    for (auto s : sizes) found += (found.empty() ? "" : ",") + std::to_string(s);
    throw WeightsShapeError("weights architecture [" + found +
                            "] does not match the expected network");
  }
  QNetworkParams params = QNetworkParams::zeros(sizes);
  for (auto& layer : params.layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
        layer.weight(i, j) = detail::get_double(in);
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = detail::get_double(in);
  }
  return params;
}

inline QNetworkParams load_weights(
    const std::string& path, std::optional<std::vector<std::size_t>> expected_sizes = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsError("cannot open " + path);
  return load_weights(in, std::move(expected_sizes));
}

}  // namespace cyclerl

#endif  // CYCLERL_WEIGHTS_IO_HPP_
