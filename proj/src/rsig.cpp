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

#include "iqaug/rsig.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "iqaug/error.hpp"

namespace iqaug {

static_assert(std::endian::native == std::endian::little, "RSIG codec assumes a little-endian host");
static_assert(std::numeric_limits<float>::is_iec559);

namespace {

constexpr std::uint8_t kMagic[4] = {0x52, 0x53, 0x49, 0x47};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { raw(&v, sizeof v); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void f32(float v) { raw(&v, sizeof v); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return take<std::uint8_t>(); }
  std::uint16_t u16() { return take<std::uint16_t>(); }
  std::uint32_t u32() { return take<std::uint32_t>(); }
  float f32() { return take<float>(); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorKind::kFormat, "RSIG: truncated input");
  }
  template <typename T>
  T take() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_rsig(const Dataset& ds) {
  ds.validate();
  if (ds.size() > std::numeric_limits<std::uint32_t>::max()) fail(ErrorKind::kInvalidInput, "RSIG: too many frames");
  if (ds.seq_len > std::numeric_limits<std::uint16_t>::max()) fail(ErrorKind::kInvalidInput, "RSIG: seq_len exceeds u16");
  if (ds.class_count() > std::numeric_limits<std::uint8_t>::max()) fail(ErrorKind::kInvalidInput, "RSIG: more than 255 classes");

  Writer w;
  w.reserve(16 + ds.size() * (2 + ds.seq_len * 8));
  w.raw(kMagic, sizeof kMagic);
  w.u32(kRsigVersion);
  w.u32(static_cast<std::uint32_t>(ds.size()));
  w.u16(static_cast<std::uint16_t>(ds.seq_len));
  w.u8(static_cast<std::uint8_t>(ds.class_count()));
  w.u8(0);
  for (const std::string& name : ds.class_names) {
    if (name.size() > 255) fail(ErrorKind::kInvalidInput, "RSIG: class name longer than 255 bytes");
    w.u8(static_cast<std::uint8_t>(name.size()));
    w.raw(name.data(), name.size());
  }
  for (const LabeledFrame& rec : ds.frames) {
    w.u8(rec.label);
    w.u8(static_cast<std::uint8_t>(rec.snr_db));
    for (const IQSample& s : rec.frame) {
      w.f32(s.i);
      w.f32(s.q);
    }
  }
  return w.take();
}

Dataset decode_rsig(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (std::uint8_t m : kMagic) {
    if (r.u8() != m) fail(ErrorKind::kFormat, "RSIG: bad magic");
  }
  if (const std::uint32_t version = r.u32(); version != kRsigVersion) {
    fail(ErrorKind::kFormat, "RSIG: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  Dataset ds;
  ds.seq_len = r.u16();
  const std::uint8_t classes = r.u8();
  if (r.u8() != 0) fail(ErrorKind::kFormat, "RSIG: reserved byte is not zero");
  for (int k = 0; k < classes; ++k) ds.class_names.push_back(r.str(r.u8()));

  ds.frames.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    LabeledFrame rec;
    rec.label = r.u8();
    rec.snr_db = static_cast<std::int8_t>(r.u8());
    if (rec.label >= classes) fail(ErrorKind::kFormat, "RSIG: label out of range in record " + std::to_string(n));
    rec.frame = SignalFrame(ds.seq_len);
    for (std::size_t t = 0; t < ds.seq_len; ++t) {
      rec.frame[t].i = r.f32();
      rec.frame[t].q = r.f32();
    }
    ds.frames.push_back(std::move(rec));
  }
  if (!r.at_end()) fail(ErrorKind::kFormat, "RSIG: trailing bytes after last record");
  return ds;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void write_rsig(const std::filesystem::path& path, const Dataset& ds) { write_file_bytes(path, encode_rsig(ds)); }

Dataset read_rsig(const std::filesystem::path& path) {
  Dataset ds = decode_rsig(read_file_bytes(path));
  ds.provenance = "rsig:" + path.filename().string();
  return ds;
}

}  // namespace iqaug
