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

#include "iqaug/nn/model.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <map>
#include <sstream>

#include "iqaug/error.hpp"
#include "iqaug/rsig.hpp"

namespace iqaug::nn {

static_assert(std::endian::native == std::endian::little, "RMDL codec assumes a little-endian host");

namespace {

constexpr std::string_view kMagicLine = "RMDL v1";

int parse_int(const std::map<std::string, std::string>& header, const std::string& key) {
  const auto it = header.find(key);
  if (it == header.end()) fail(ErrorKind::kFormat, "RMDL: missing header key '" + key + "'");
  int value = 0;
  const auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), value);
  if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
    fail(ErrorKind::kFormat, "RMDL: bad integer for '" + key + "'");
  }
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_rmdl(const Model& model) {
  const Shape& s = model.params.shape();
  if (model.class_names.size() != static_cast<std::size_t>(s.classes)) {
    fail(ErrorKind::kInvalidInput, "RMDL: class table size does not match the network");
  }
  std::ostringstream head;
  head << kMagicLine << '\n'
       << "hidden: " << s.hidden << '\n'
       << "layers: " << kLayers << '\n'
       << "classes: " << s.classes << '\n'
       << "input_dim: " << s.input_dim << '\n'
       << "seq_len: " << model.seq_len << '\n'
       << "class_names: ";
  for (std::size_t k = 0; k < model.class_names.size(); ++k) {
    const std::string& name = model.class_names[k];
    if (name.empty() || name.find_first_of(",\r\n") != std::string::npos) {
      fail(ErrorKind::kInvalidInput, "RMDL: class name '" + name + "' is empty or contains ',' or a line break");
    }
    head << (k ? "," : "") << name;
  }
  std::string provenance = model.provenance;
  for (char& ch : provenance) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  head << '\n' << "provenance: " << provenance << '\n' << '\n';

  const std::string text = head.str();
  std::vector<std::uint8_t> out(text.begin(), text.end());
  const auto& flat = model.params.flat();
  const std::size_t offset = out.size();
  out.resize(offset + static_cast<std::size_t>(flat.size()) * sizeof(float));
  std::memcpy(out.data() + offset, flat.data(), static_cast<std::size_t>(flat.size()) * sizeof(float));
  return out;
}

Model decode_rmdl(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    if (pos == bytes.size()) fail(ErrorKind::kFormat, "RMDL: header not terminated");
    std::string line(reinterpret_cast<const char*>(bytes.data() + start), pos - start);
    ++pos;
    return line;
  };
  if (next_line() != kMagicLine) fail(ErrorKind::kFormat, "RMDL: bad magic line");
  std::map<std::string, std::string> header;
  for (std::string line = next_line(); !line.empty(); line = next_line()) {
    const std::size_t colon = line.find(": ");
    if (colon == std::string::npos) fail(ErrorKind::kFormat, "RMDL: malformed header line '" + line + "'");
    header[line.substr(0, colon)] = line.substr(colon + 2);
  }
  if (parse_int(header, "layers") != kLayers) fail(ErrorKind::kFormat, "RMDL: only 2-layer networks are supported");
  Shape shape{parse_int(header, "input_dim"), parse_int(header, "hidden"), parse_int(header, "classes")};
  if (shape.input_dim < 1 || shape.hidden < 1 || shape.classes < 1) fail(ErrorKind::kFormat, "RMDL: bad dimensions");

  Model model;
  model.seq_len = static_cast<std::size_t>(parse_int(header, "seq_len"));
  model.provenance = header["provenance"];
  std::stringstream names(header["class_names"]);
  for (std::string name; std::getline(names, name, ',');) model.class_names.push_back(name);
  if (model.class_names.size() != static_cast<std::size_t>(shape.classes)) {
    fail(ErrorKind::kFormat, "RMDL: class_names disagrees with classes");
  }

  model.params = NetworkParams<float>(shape);
  const std::size_t payload = static_cast<std::size_t>(model.params.size()) * sizeof(float);
  if (bytes.size() - pos != payload) fail(ErrorKind::kFormat, "RMDL: parameter block has the wrong size");
  std::memcpy(model.params.flat().data(), bytes.data() + pos, payload);
  return model;
}

void write_rmdl(const std::filesystem::path& path, const Model& model) { write_file_bytes(path, encode_rmdl(model)); }

Model read_rmdl(const std::filesystem::path& path) { return decode_rmdl(read_file_bytes(path)); }

}  // namespace iqaug::nn
