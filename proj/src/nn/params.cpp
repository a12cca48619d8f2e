// Copyright 2026 The iqaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "iqaug/nn/params.hpp"

namespace iqaug::nn {

std::int64_t count_params(int hidden, int classes, int input_dim) {
  if (hidden < 1 || classes < 1 || input_dim < 1) fail(ErrorKind::kInvalidArgument, "count_params: dimensions must be positive");
  const std::int64_t h = hidden;
  const std::int64_t k = classes;
  auto layer = [h](std::int64_t d) { return 4 * h * d + 4 * h * h + 8 * h; };
  return layer(input_dim) + layer(h) + h * k + k;
}

std::int64_t macs_per_step(int hidden, int input_dim) {
  const std::int64_t h = hidden;
  return 4 * h * (input_dim + h) + 4 * h * (h + h);
}

std::vector<TensorInfo> tensor_layout(const Shape& shape) {
  std::vector<TensorInfo> out;
  std::int64_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    out.push_back({std::move(name), offset, rows, cols});
    offset += std::int64_t{rows} * cols;
  };
  const int h = shape.hidden;
  for (int layer = 0; layer < kLayers; ++layer) {
    const std::string prefix = "lstm" + std::to_string(layer + 1) + ".";
    add(prefix + "w_ih", 4 * h, layer == 0 ? shape.input_dim : h);
    add(prefix + "w_hh", 4 * h, h);
    add(prefix + "b_ih", 4 * h, 1);
    add(prefix + "b_hh", 4 * h, 1);
  }
  add("head.w", shape.classes, h);
  add("head.b", shape.classes, 1);
  return out;
}

}  // namespace iqaug::nn
