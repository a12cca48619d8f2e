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

#include <span>

namespace iqaug::nn {

/// Halves the learning rate once the best training accuracy has gone
/// `patience` consecutive epochs without strictly improving; the counter then
/// restarts while the best value is kept.
class PlateauSchedule {
 public:
  explicit PlateauSchedule(int patience = 3) : patience_(patience) {}

  /// Records one epoch's accuracy; returns true if the rate should be halved.
  bool observe(double accuracy);

  int patience() const noexcept { return patience_; }

 private:
  int patience_;
  bool seen_ = false;
  double best_ = 0.0;
  int stale_ = 0;
};

/// Replays `history` (one training accuracy per completed epoch) through a
/// PlateauSchedule and returns the rate for the next epoch.
double next_learning_rate(std::span<const double> history, double current_lr, int patience = 3);

}  // namespace iqaug::nn
