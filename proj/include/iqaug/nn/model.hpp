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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "iqaug/nn/params.hpp"

namespace iqaug::nn {

/// A trained classifier with the class table it predicts over.
struct Model {
  NetworkParams<float> params;
  std::vector<std::string> class_names;
  std::size_t seq_len = 0;
  std::string provenance;
};

// RMDL v1 model file:
//
//   RMDL v1
//   hidden: <h>
//   layers: 2
//   classes: <K>
//   input_dim: <d>
//   seq_len: <frame length used in training>
//   class_names: <comma-separated>
//   provenance: <single line>
//   <blank line>
//   parameters as little-endian f32 in tensor_layout() order
//
// Class names may not contain commas or line breaks; line breaks in the
// provenance are written as spaces.

std::vector<std::uint8_t> encode_rmdl(const Model& model);
Model decode_rmdl(std::span<const std::uint8_t> bytes);

void write_rmdl(const std::filesystem::path& path, const Model& model);
Model read_rmdl(const std::filesystem::path& path);

}  // namespace iqaug::nn
