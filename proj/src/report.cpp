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

#include "iqaug/report.hpp"

#include <cstdio>
#include <fstream>

#include "iqaug/error.hpp"

namespace iqaug {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string accuracy_csv(const Metrics& metrics) {
  std::string out = "snr_db,accuracy,n\n";
  for (const auto& [snr, m] : metrics.per_snr) {
    out += std::to_string(snr) + "," + fixed6(m.accuracy()) + "," + std::to_string(m.total) + "\n";
  }
  return out;
}

std::string confusion_csv(const Metrics& metrics, int snr_db) {
  const auto it = metrics.per_snr.find(snr_db);
  if (it == metrics.per_snr.end()) fail(ErrorKind::kInvalidArgument, "no metrics for SNR " + std::to_string(snr_db));
  std::string out = "true\\predicted";
  for (const std::string& name : metrics.class_names) out += "," + name;
  out += "\n";
  for (std::size_t r = 0; r < metrics.class_names.size(); ++r) {
    out += metrics.class_names[r];
    for (std::int64_t count : it->second.confusion[r]) out += "," + std::to_string(count);
    out += "\n";
  }
  return out;
}

std::string history_csv(std::span<const nn::EpochRecord> history) {
  std::string out = "epoch,train_loss,train_acc,lr\n";
  for (const nn::EpochRecord& rec : history) {
    out += std::to_string(rec.epoch) + "," + fixed6(rec.train_loss) + "," + fixed6(rec.train_acc) + "," +
           fixed6(rec.lr) + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot create " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void write_metric_reports(const std::filesystem::path& dir, const Metrics& metrics) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
  write_text_file(dir / "accuracy_vs_snr.csv", accuracy_csv(metrics));
  for (const auto& [snr, m] : metrics.per_snr) {
    write_text_file(dir / ("confusion_" + std::to_string(snr) + ".csv"), confusion_csv(metrics, snr));
  }
}

}  // namespace iqaug
