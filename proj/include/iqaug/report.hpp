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

#include <filesystem>
#include <span>
#include <string>

#include "iqaug/experiments.hpp"
#include "iqaug/nn/trainer.hpp"

namespace iqaug {

// CSV reports: comma-separated, LF line endings, reals with six decimals.
//
//   accuracy_vs_snr.csv   snr_db,accuracy,n
//   confusion_<snr>.csv   header row and column of class names; rows are
//                         true classes, columns predicted
//   history.csv           epoch,train_loss,train_acc,lr

std::string accuracy_csv(const Metrics& metrics);
std::string confusion_csv(const Metrics& metrics, int snr_db);
std::string history_csv(std::span<const nn::EpochRecord> history);

/// Writes accuracy_vs_snr.csv and one confusion_<snr>.csv per SNR.
void write_metric_reports(const std::filesystem::path& dir, const Metrics& metrics);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace iqaug
