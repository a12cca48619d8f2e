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

#include "iqaug/nn/schedule.hpp"

#include "iqaug/error.hpp"

namespace iqaug::nn {

bool PlateauSchedule::observe(double accuracy) {
  if (!seen_ || accuracy > best_) {
    seen_ = true;
    best_ = accuracy;
    stale_ = 0;
    return false;
  }
  if (++stale_ >= patience_) {
    stale_ = 0;
    return true;
  }
  return false;
}

double next_learning_rate(std::span<const double> history, double current_lr, int patience) {
  if (history.empty()) fail(ErrorKind::kInvalidInput, "next_learning_rate: empty history");
  PlateauSchedule schedule(patience);
  bool halve = false;
  for (double acc : history) halve = schedule.observe(acc);
  return halve ? current_lr / 2.0 : current_lr;
}

}  // namespace iqaug::nn
