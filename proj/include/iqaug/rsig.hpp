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
#include <vector>

#include "iqaug/signal.hpp"

namespace iqaug {

// RSIG v1 dataset container, little-endian:
//
//   "RSIG" | u32 version=1 | u32 frame_count | u16 seq_len | u8 class_count | u8 0
//   class_count x (u8 byte length, UTF-8 name)
//   frame_count x (u8 label, i8 snr_db, seq_len x (f32 I, f32 Q))
//
// Provenance is not stored; readers fill it with the source description.

inline constexpr std::uint32_t kRsigVersion = 1;

std::vector<std::uint8_t> encode_rsig(const Dataset& ds);
Dataset decode_rsig(std::span<const std::uint8_t> bytes);

void write_rsig(const std::filesystem::path& path, const Dataset& ds);
Dataset read_rsig(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace iqaug
