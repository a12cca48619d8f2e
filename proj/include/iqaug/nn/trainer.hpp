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

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "iqaug/nn/params.hpp"
#include "iqaug/signal.hpp"

namespace iqaug::nn {

struct TrainConfig {
  int epochs = 80;
  int batch_size = 128;
  double initial_lr = 0.001;
  double dropout = 0.5;
  int plateau_patience = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;  // fraction in [0, 1], measured on the dropped-out forward pass
  double lr = 0.0;         // rate used during this epoch
};

/// Mini-batches are split into fixed 32-sample chunks whose gradients are
/// summed in chunk order, so trajectories do not depend on `threads`.
inline constexpr int kGradientChunk = 32;

/// Adam + plateau-halving training over `train` (features are extracted
/// per batch with frame_features).  Epoch e shuffles with the substream
/// (seed, e); dropout masks come from (seed, e, batch, chunk).
std::vector<EpochRecord> train_network(NetworkParams<float>& params, const Dataset& train, const TrainConfig& cfg,
                                       int threads = 1,
                                       const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Eval-mode probabilities (K x n) for frames, in fixed 64-frame chunks.
Eigen::MatrixXf predict_proba(const NetworkParams<float>& params, std::span<const SignalFrame> frames, int threads = 1);

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& column) {
  int best = 0;
  for (Eigen::Index k = 1; k < column.size(); ++k) {
    if (column(k) > column(best)) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace iqaug::nn
